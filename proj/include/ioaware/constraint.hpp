#pragma once

#include "ioaware/error.hpp"

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace ioaware {

/// Bandwidth in whole MB/s.
using Mbps = std::int64_t;

struct StaticBw {
   Mbps value = 0;
   friend bool operator==(const StaticBw&, const StaticBw&) = default;
};

/// auto(min,max,delta): geometric progression min, min*delta, ... <= max.
struct AutoBounded {
   Mbps min = 0;
   Mbps max = 0;
   std::int64_t delta = 2;
   friend bool operator==(const AutoBounded&, const AutoBounded&) = default;
};

/// auto: start from peak/io_executors and double while task time halves.
struct AutoUnbounded {
   friend bool operator==(const AutoUnbounded&, const AutoUnbounded&) = default;
};

/// Storage bandwidth constraint attached to an I/O task.
class ConstraintSpec {
public:
   using Variant = std::variant<StaticBw, AutoBounded, AutoUnbounded>;

   ConstraintSpec() : v_(AutoUnbounded{}) {}

   static ConstraintSpec fixed(Mbps value) {
      if (value <= 0) throw WorkloadError("storage bandwidth constraint must be positive, got " + std::to_string(value));
      return ConstraintSpec(StaticBw{value});
   }
   static ConstraintSpec bounded(Mbps min, Mbps max, std::int64_t delta) {
      if (min <= 0 || min > max)
         throw WorkloadError("auto constraint requires 0 < min <= max");
      if (delta < 2) throw WorkloadError("auto constraint delta must be an integer >= 2");
      return ConstraintSpec(AutoBounded{min, max, delta});
   }
   static ConstraintSpec unbounded() { return ConstraintSpec(AutoUnbounded{}); }

   /// Parses "20", "auto" or "auto(min,max,delta)".
   static ConstraintSpec parse(std::string_view text);

   bool is_static() const { return std::holds_alternative<StaticBw>(v_); }
   bool is_auto() const { return !is_static(); }
   bool is_bounded() const { return std::holds_alternative<AutoBounded>(v_); }
   Mbps static_value() const { return std::get<StaticBw>(v_).value; }
   const AutoBounded& bounds() const { return std::get<AutoBounded>(v_); }
   const Variant& variant() const { return v_; }

   std::string to_string() const {
      if (is_static()) return std::to_string(static_value());
      if (is_bounded()) {
         const auto& b = bounds();
         return "auto(" + std::to_string(b.min) + "," + std::to_string(b.max) + "," + std::to_string(b.delta) + ")";
      }
      return "auto";
   }

   friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;

private:
   explicit ConstraintSpec(Variant v) : v_(v) {}
   Variant v_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
   while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
   while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
   return s;
}

inline std::int64_t parse_int(std::string_view s, std::string_view what) {
   s = trim(s);
   std::int64_t value = 0;
   auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
   if (ec != std::errc{} || ptr != s.data() + s.size())
      throw WorkloadError("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
   return value;
}

} // namespace detail

inline ConstraintSpec ConstraintSpec::parse(std::string_view text) {
   text = detail::trim(text);
   if (text == "auto") return unbounded();
   if (text.starts_with("auto(")) {
      if (!text.ends_with(")")) throw WorkloadError("unterminated auto constraint: " + std::string(text));
      auto body = text.substr(5, text.size() - 6);
      auto c1 = body.find(',');
      auto c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
      if (c2 == std::string_view::npos || body.find(',', c2 + 1) != std::string_view::npos)
         throw WorkloadError("auto constraint needs exactly three values: " + std::string(text));
      return bounded(detail::parse_int(body.substr(0, c1), "min"),
                     detail::parse_int(body.substr(c1 + 1, c2 - c1 - 1), "max"),
                     detail::parse_int(body.substr(c2 + 1), "delta"));
   }
   return fixed(detail::parse_int(text, "storage bandwidth"));
}

} // namespace ioaware
