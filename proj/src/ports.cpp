#include "mrrhom/ports.hpp"

#include <cctype>

#include "mrrhom/errors.hpp"

namespace mrrhom
{

char port_letter(Port p) noexcept { return static_cast<char>('a' + index(p)); }

Port parse_port(char letter)
{
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(letter)));
    if (lower < 'a' || lower > 'd')
    {
        throw DomainError(std::string("unknown port '") + letter + "', expected one of a, b, c, d");
    }
    return static_cast<Port>(lower - 'a');
}

PortPair parse_port_pair(std::string_view text)
{
    if (text.size() != 2)
    {
        throw DomainError("port pair must be two letters such as AB, got '" + std::string(text) + "'");
    }
    return PortPair{parse_port(text[0]), parse_port(text[1])};
}

std::string to_string(PortPair pair)
{
    std::string s;
    s += static_cast<char>(std::toupper(static_cast<unsigned char>(port_letter(pair.first))));
    s += static_cast<char>(std::toupper(static_cast<unsigned char>(port_letter(pair.second))));
    return s;
}

} // namespace mrrhom
