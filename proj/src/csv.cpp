#include "windres/csv.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

namespace windres
{

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        char const c = line[i];
        if (quoted)
        {
            if (c == '"')
            {
                if (i + 1 < line.size() && line[i + 1] == '"')
                {
                    field.push_back('"');
                    ++i;
                }
                else
                {
                    quoted = false;
                }
            }
            else
            {
                field.push_back(c);
            }
        }
        else if (c == '"')
        {
            quoted = true;
        }
        else if (c == ',')
        {
            out.push_back(std::move(field));
            field.clear();
        }
        else
        {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string{field};
    std::string out = "\"";
    for (char c : field)
    {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

CsvTable CsvTable::read(std::filesystem::path const& path)
{
    std::ifstream in{path};
    if (!in)
        throw CsvError{"cannot open '" + path.string() + "'"};
    return parse(in);
}

CsvTable CsvTable::parse(std::istream& in)
{
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        auto fields = split_csv_line(line);
        if (!have_header)
        {
            for (auto& f : fields)
            {
                auto const b = f.find_first_not_of(" \t");
                auto const e = f.find_last_not_of(" \t");
                f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
            }
            if (std::all_of(fields.begin(), fields.end(),
                            [](auto const& f) { return f.empty(); }))
                throw CsvError{"unparsable header"};
            table.header_ = std::move(fields);
            have_header = true;
            continue;
        }
        table.rows_.push_back({line_no, std::move(fields)});
    }
    return table;
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const
{
    auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - header_.begin());
}

} // namespace windres
