#ifndef MRRHOM_PORTS_HPP
#define MRRHOM_PORTS_HPP

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace mrrhom
{

// Exterior modes of a double-bus ring, in the global basis order (a, b, c, d).
//
//   a : bottom bus, left -> right (ccw family)
//   b : top bus,    right -> left (ccw family)
//   c : bottom bus, right -> left (cw family)
//   d : top bus,    left -> right (cw family)
enum class Port : int
{
    a = 0,
    b = 1,
    c = 2,
    d = 3
};

inline constexpr std::size_t kPortCount = 4;
inline constexpr std::array<Port, kPortCount> kAllPorts = {Port::a, Port::b, Port::c, Port::d};

constexpr std::size_t index(Port p) noexcept { return static_cast<std::size_t>(p); }

// Right-movers enter at the left edge of a device and leave at the right edge.
constexpr bool is_right_moving(Port p) noexcept { return p == Port::a || p == Port::d; }

char port_letter(Port p) noexcept;

// Accepts 'a'..'d' in either case; throws DomainError otherwise.
Port parse_port(char letter);

struct PortPair
{
    Port first = Port::a;
    Port second = Port::b;

    bool distinct() const noexcept { return first != second; }
    bool operator==(const PortPair&) const = default;
};

inline constexpr PortPair kAB{Port::a, Port::b};
inline constexpr PortPair kCD{Port::c, Port::d};
inline constexpr PortPair kAD{Port::a, Port::d};

// "AB", "cd", ... ; throws DomainError on malformed text.
PortPair parse_port_pair(std::string_view text);
std::string to_string(PortPair pair);

} // namespace mrrhom

#endif // MRRHOM_PORTS_HPP
