#include "hydrolstm/date.hpp"

#include <charconv>
#include <cstdio>

#include "hydrolstm/error.hpp"

namespace hydrolstm {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) fail(ErrorKind::MalformedRecord, "bad date '" + std::string(text) + "'");
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        fail(ErrorKind::MalformedRecord, "bad date '" + std::string(text) + "', expected YYYY-MM-DD");
    using namespace std::chrono;
    const year_month_day ymd{year{parse_field(text, 0, 4)},
                             month{static_cast<unsigned>(parse_field(text, 5, 2))},
                             day{static_cast<unsigned>(parse_field(text, 8, 2))}};
    if (!ymd.ok()) fail(ErrorKind::MalformedRecord, "invalid calendar date '" + std::string(text) + "'");
    return sys_days{ymd};
}

std::string format_date(Date d) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int day_of_year(Date d) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    const sys_days jan1{ymd.year() / January / 1};
    return static_cast<int>((d - jan1).count()) + 1;
}

Date add_years(Date d, int years) {
    using namespace std::chrono;
    year_month_day ymd{d};
    ymd += std::chrono::years{years};
    // Feb 29 rolls to Mar 1 in non-leap targets.
    if (!ymd.ok()) return sys_days{ymd.year() / ymd.month() / last} + std::chrono::days{1};
    return sys_days{ymd};
}

}  // namespace hydrolstm
