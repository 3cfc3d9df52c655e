#include "mrrhom/checksum.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

namespace mrrhom
{

namespace
{

struct DigestContext
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

    DigestContext()
    {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        {
            throw std::runtime_error("sha256: digest initialisation failed");
        }
    }

    void update(const char* data, std::size_t size)
    {
        if (EVP_DigestUpdate(ctx.get(), data, size) != 1)
        {
            throw std::runtime_error("sha256: digest update failed");
        }
    }

    std::string hex()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned int length = 0;
        if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
        {
            throw std::runtime_error("sha256: digest finalisation failed");
        }
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        out.reserve(2 * length);
        for (unsigned int k = 0; k < length; ++k)
        {
            out.push_back(kHex[digest[k] >> 4]);
            out.push_back(kHex[digest[k] & 0xF]);
        }
        return out;
    }
};

} // namespace

std::string sha256_hex(std::string_view data)
{
    DigestContext d;
    d.update(data.data(), data.size());
    return d.hex();
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error("sha256: cannot read " + path.string());
    }
    DigestContext d;
    std::array<char, 1 << 16> buffer{};
    while (in)
    {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        d.update(buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    return d.hex();
}

} // namespace mrrhom
