#include "planet/csv.hpp"

#include <istream>
#include <ostream>

#include "planet/error.hpp"

namespace planet {

std::string csv_escape(std::string_view field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_csv(std::ostream& out, const std::vector<std::string>& comments,
               const std::vector<std::vector<std::string>>& rows) {
  for (const auto& comment : comments) {
    out << "# " << comment << "\n";
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(row[i]);
    }
    out << "\n";
  }
}

CsvFile read_csv(std::istream& in) {
  CsvFile file;
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::size_t i = 0;
  bool at_line_start = true;
  std::vector<std::string> row;
  std::string field;
  bool in_row = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    file.rows.push_back(std::move(row));
    row.clear();
    in_row = false;
    at_line_start = true;
  };

  while (i < text.size()) {
    char c = text[i];
    if (at_line_start && c == '#') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '\n') ++j;
      std::string comment = text.substr(i + 1, j - i - 1);
      if (!comment.empty() && comment[0] == ' ') comment.erase(0, 1);
      if (!comment.empty() && comment.back() == '\r') comment.pop_back();
      file.comments.push_back(std::move(comment));
      i = j + (j < text.size() ? 1 : 0);
      continue;
    }
    at_line_start = false;
    if (c == '"') {
      if (!field.empty()) {
        fail(Errc::CsvFormat, "quote inside an unquoted field");
      }
      ++i;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        field.push_back(text[i]);
        ++i;
      }
      if (!closed) fail(Errc::CsvFormat, "unterminated quoted field");
      in_row = true;
      continue;
    }
    if (c == ',') {
      end_field();
      in_row = true;
      ++i;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      if (in_row || !field.empty()) end_row();
      at_line_start = true;
      continue;
    }
    field.push_back(c);
    in_row = true;
    ++i;
  }
  if (in_row || !field.empty()) end_row();
  return file;
}

}  // namespace planet
