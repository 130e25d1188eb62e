#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace hydrolstm {

/// Calendar day. Arithmetic is in whole days.
using Date = std::chrono::sys_days;

/// Parses a strict `YYYY-MM-DD` string; throws Error(MalformedRecord) otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// 1-based day of year (1..366).
int day_of_year(Date d);

Date add_years(Date d, int years);

inline long days_between(Date from, Date to) { return (to - from).count(); }

}  // namespace hydrolstm
