#ifndef PLANET_CSV_HPP
#define PLANET_CSV_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace planet {

// RFC 4180 quoting, applied only when needed.
std::string csv_escape(std::string_view field);

// Writes comment lines ("# ..."), then rows, comma-separated, LF endings.
void write_csv(std::ostream& out, const std::vector<std::string>& comments,
               const std::vector<std::vector<std::string>>& rows);

struct CsvFile {
  std::vector<std::string> comments;  // leading '#' lines, prefix stripped
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 reader that also accepts leading '#' comment lines.
// Throws Errc::CsvFormat on malformed input.
CsvFile read_csv(std::istream& in);

}  // namespace planet

#endif  // PLANET_CSV_HPP
