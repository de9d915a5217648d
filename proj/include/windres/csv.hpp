#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace windres
{

class CsvError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct CsvRow
{
    std::size_t line = 0; // 1-based line in the source file
    std::vector<std::string> fields;
};

/// A header plus data rows. Blank lines and lines starting with '#' are
/// skipped; an empty file yields an empty header and no rows.
class CsvTable
{
  public:
    static CsvTable read(std::filesystem::path const& path);
    static CsvTable parse(std::istream& in);

    std::vector<std::string> const& header() const { return header_; }
    std::vector<CsvRow> const& rows() const { return rows_; }

    std::optional<std::size_t> column(std::string_view name) const;

  private:
    std::vector<std::string> header_;
    std::vector<CsvRow> rows_;
};

/// Splits one record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field if it contains a separator, quote, or newline.
std::string csv_escape(std::string_view field);

} // namespace windres
