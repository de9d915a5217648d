#include "windres/time.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace windres
{

namespace
{

class Cursor
{
  public:
    explicit Cursor(std::string_view s) : text_(s) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    bool consume(char c)
    {
        if (peek() != c)
            return false;
        ++pos_;
        return true;
    }

    // Exactly `width` decimal digits.
    std::optional<int> digits(std::size_t width)
    {
        if (pos_ + width > text_.size())
            return std::nullopt;
        int value = 0;
        auto const* first = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, first + width, value);
        if (ec != std::errc{} || ptr != first + width)
            return std::nullopt;
        pos_ += width;
        return value;
    }

    // Fractional digits after a '.', as a value in [0, 1).
    double fraction()
    {
        double scale = 0.1;
        double value = 0.0;
        while (!done() && std::isdigit(static_cast<unsigned char>(peek())))
        {
            value += scale * (peek() - '0');
            scale *= 0.1;
            ++pos_;
        }
        return value;
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::optional<Minute> parse_timestamp(std::string_view text)
{
    using namespace std::chrono;

    Cursor in{trim(text)};
    auto y = in.digits(4);
    if (!y || !in.consume('-'))
        return std::nullopt;
    auto mo = in.digits(2);
    if (!mo || !in.consume('-'))
        return std::nullopt;
    auto d = in.digits(2);
    if (!d)
        return std::nullopt;
    if (!in.consume('T') && !in.consume(' '))
        return std::nullopt;
    auto h = in.digits(2);
    if (!h || !in.consume(':'))
        return std::nullopt;
    auto mi = in.digits(2);
    if (!mi)
        return std::nullopt;

    double seconds = 0.0;
    if (in.consume(':'))
    {
        auto s = in.digits(2);
        if (!s)
            return std::nullopt;
        seconds = *s;
        if (in.consume('.'))
            seconds += in.fraction();
    }

    int offset_minutes = 0;
    if (in.consume('Z') || in.consume('z'))
    {
    }
    else if (in.peek() == '+' || in.peek() == '-')
    {
        int const sign = in.peek() == '-' ? -1 : 1;
        in.consume(in.peek());
        auto oh = in.digits(2);
        if (!oh)
            return std::nullopt;
        in.consume(':');
        auto om = in.digits(2);
        if (!om || *oh > 23 || *om > 59)
            return std::nullopt;
        offset_minutes = sign * (*oh * 60 + *om);
    }
    if (!in.done())
        return std::nullopt;

    year_month_day const ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                             day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || seconds >= 61.0)
        return std::nullopt;

    Minute const days = sys_days{ymd}.time_since_epoch().count();
    Minute t = days * 1440 + *h * 60 + *mi - offset_minutes;
    if (seconds >= 30.0)
        t += 1;
    return t;
}

std::string format_timestamp(Minute t)
{
    using namespace std::chrono;
    Minute const day_count = t >= 0 ? t / 1440 : -((-t + 1439) / 1440);
    Minute const in_day = t - day_count * 1440;
    year_month_day const ymd{sys_days{days{day_count}}};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:00+00:00",
                       static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()),
                       in_day / 60, in_day % 60);
}

} // namespace windres
