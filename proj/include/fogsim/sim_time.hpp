// Fixed-point simulation time (integer microseconds).

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>

namespace fogsim {

class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_us(std::int64_t us) { return SimTime{us}; }

    // Rounds to the nearest microsecond.
    static SimTime from_ms(double ms) { return SimTime{static_cast<std::int64_t>(std::llround(ms * 1000.0))}; }
    static SimTime from_s(double s) { return from_ms(s * 1000.0); }

    [[nodiscard]] constexpr std::int64_t us() const { return us_; }
    [[nodiscard]] constexpr double ms() const { return static_cast<double>(us_) / 1000.0; }
    [[nodiscard]] constexpr double seconds() const { return static_cast<double>(us_) / 1.0e6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime& operator+=(SimTime d) {
        us_ += d.us_;
        return *this;
    }
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.us_ + b.us_}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.us_ - b.us_}; }

    friend std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.us_ << "us"; }

private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}

    std::int64_t us_ = 0;
};

inline SimTime max(SimTime a, SimTime b) { return a < b ? b : a; }

} // namespace fogsim
