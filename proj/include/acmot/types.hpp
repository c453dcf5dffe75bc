#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acmot {

using FrameIndex = int;

/// Identifier of one state (one detection) inside an ACGraph.
struct StateId {
    std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

    constexpr StateId() = default;
    constexpr explicit StateId(std::uint32_t v) : value(v) {}

    constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
    constexpr auto operator<=>(const StateId&) const = default;
};

struct BBox {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    double cx() const { return left + 0.5 * width; }
    double cy() const { return top + 0.5 * height; }
    double area() const { return width * height; }
    bool valid() const { return width > 0.0 && height > 0.0 && std::isfinite(left) && std::isfinite(top); }

    bool operator==(const BBox&) const = default;
};

/// A detection as seen by the tracker. `appearance` is a normalized histogram when present.
struct Observation {
    FrameIndex frame = 0;
    BBox bbox;
    double confidence = 1.0;
    std::vector<double> appearance;

    bool has_appearance() const { return !appearance.empty(); }
};

enum class Clarity : std::uint8_t { Clear, Ambiguous };

inline const char* to_string(Clarity c) { return c == Clarity::Clear ? "C" : "A"; }

/// Rejection of a call whose precondition does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kHistogramSumTolerance = 1e-9;

/// Throws PreconditionError unless `h` is non-negative and sums to 1.
inline void require_normalized(const std::vector<double>& h, const char* what) {
    double sum = 0.0;
    for (double v : h) {
        if (!(v >= 0.0)) throw PreconditionError(std::string(what) + ": negative or NaN bin");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kHistogramSumTolerance)
        throw PreconditionError(std::string(what) + ": histogram does not sum to 1");
}

}  // namespace acmot

template <>
struct std::hash<acmot::StateId> {
    std::size_t operator()(const acmot::StateId& id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
