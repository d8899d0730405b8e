#include "everlast/serialization.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "everlast/errors.hpp"

namespace everlast::io {

namespace {

struct Record {
  std::string element;
  std::string value;
};

struct Parsed {
  std::string header;
  std::vector<Record> records;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Parsed parse(std::istream& in, std::string_view kind, std::string_view value_column) {
  Parsed out;
  std::string line;
  const std::string magic = "# everlast " + std::string(kind) + " v1";
  if (!std::getline(in, line) || trim(line).substr(0, magic.size()) != magic) {
    throw ConfigError("expected header '" + magic + "'");
  }
  out.header = std::string(trim(line));
  const std::string columns = "element," + std::string(value_column);
  if (!std::getline(in, line) || trim(line) != columns) {
    throw ConfigError("expected column line '" + columns + "'");
  }
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.rfind(',');
    if (comma == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'element,value'");
    }
    out.records.push_back({std::string(trim(t.substr(0, comma))), std::string(trim(t.substr(comma + 1)))});
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("not a count: '" + s + "'");
  return v;
}

std::vector<double> bind_values(const Parsed& parsed, const Domain& domain) {
  std::vector<double> values(domain.size());
  std::vector<bool> seen(domain.size(), false);
  for (const auto& r : parsed.records) {
    const auto idx = domain.index_of(r.element);
    if (!idx) throw ConfigError("element '" + r.element + "' is not in the domain");
    if (seen[*idx]) throw ConfigError("element '" + r.element + "' listed twice");
    seen[*idx] = true;
    values[*idx] = parse_double(r.value);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ConfigError("element '" + domain.label(i) + "' missing");
  }
  return values;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_distribution(std::ostream& out, const Distribution& dist) {
  out << "# everlast distribution v1\n" << "element,probability\n";
  const auto& domain = *dist.domain();
  const auto probs = dist.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) out << domain.label(i) << ',' << format_double(probs[i]) << '\n';
}

Distribution read_distribution(std::istream& in) {
  const auto parsed = parse(in, "distribution", "probability");
  if (parsed.records.empty()) throw ConfigError("distribution has no elements");
  bool integer_labels = true;
  std::vector<std::string> labels;
  std::vector<double> probs;
  labels.reserve(parsed.records.size());
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    labels.push_back(parsed.records[i].element);
    probs.push_back(parse_double(parsed.records[i].value));
    integer_labels = integer_labels && labels.back() == std::to_string(i);
  }
  auto domain = integer_labels ? Domain::integers(labels.size()) : Domain::labeled(std::move(labels));
  return Distribution(std::move(domain), std::move(probs));
}

void write_query(std::ostream& out, const Query& q) {
  out << "# everlast query v1 id=" << q.id() << '\n' << "element,value\n";
  const auto& domain = *q.domain();
  const auto values = q.values();
  for (std::size_t i = 0; i < values.size(); ++i) out << domain.label(i) << ',' << format_double(values[i]) << '\n';
}

Query read_query(std::istream& in, DomainPtr domain) {
  if (!domain) throw ConfigError("read_query needs a domain");
  const auto parsed = parse(in, "query", "value");
  std::string id;
  const auto pos = parsed.header.find("id=");
  if (pos != std::string::npos) id = parsed.header.substr(pos + 3);
  auto values = bind_values(parsed, *domain);
  return Query(std::move(id), std::move(domain), std::move(values));
}

void write_dataset(std::ostream& out, const Dataset& d) {
  out << "# everlast dataset v1\n" << "element,count\n";
  const auto& domain = *d.domain();
  std::vector<std::size_t> counts(domain.size(), 0);
  for (auto s : d.samples()) ++counts[s];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) out << domain.label(i) << ',' << counts[i] << '\n';
  }
}

Dataset read_dataset(std::istream& in, DomainPtr domain) {
  if (!domain) throw ConfigError("read_dataset needs a domain");
  const auto parsed = parse(in, "dataset", "count");
  std::vector<std::size_t> counts(domain->size(), 0);
  for (const auto& r : parsed.records) {
    const auto idx = domain->index_of(r.element);
    if (!idx) throw ConfigError("element '" + r.element + "' is not in the domain");
    counts[*idx] += parse_count(r.value);
  }
  std::vector<std::uint32_t> samples;
  for (std::size_t i = 0; i < counts.size(); ++i) samples.insert(samples.end(), counts[i], static_cast<std::uint32_t>(i));
  return Dataset(std::move(domain), std::move(samples));
}

}  // namespace everlast::io
