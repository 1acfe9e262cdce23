#include "polblock/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>

#include "polblock/errors.hpp"

namespace polblock::keyvalue {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string where(const Entry& e)
{
    std::ostringstream os;
    os << "line " << e.line << ": key '" << (e.section.empty() ? "" : e.section + ".") << e.key << "'";
    return os.str();
}

} // namespace

std::vector<Entry> parse(std::istream& in, const std::string& source, bool allow_sections)
{
    std::vector<Entry> entries;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto cut = raw.find_first_of("#;");
        std::string line = trim(std::string_view(raw).substr(0, cut));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (!allow_sections) {
                throw Error(ErrorKind::parse, "config",
                            source + ":" + std::to_string(line_no) + ": sections are not allowed here");
            }
            if (line.back() != ']' || line.size() < 3) {
                throw Error(ErrorKind::parse, "config",
                            source + ":" + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::parse, "config",
                        source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        Entry e{section, trim(std::string_view(line).substr(0, eq)),
                trim(std::string_view(line).substr(eq + 1)), line_no};
        if (e.key.empty() || e.value.empty()) {
            throw Error(ErrorKind::parse, "config",
                        source + ":" + std::to_string(line_no) + ": empty key or value");
        }
        const bool duplicate = std::any_of(entries.begin(), entries.end(), [&](const Entry& o) {
            return o.section == e.section && o.key == e.key;
        });
        if (duplicate) {
            throw Error(ErrorKind::parse, "config",
                        source + ":" + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

double to_double(const Entry& entry, const std::string& module)
{
    double v = 0.0;
    const char* begin = entry.value.data();
    const char* end = begin + entry.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorKind::parse, module, where(entry) + " is not a number: '" + entry.value + "'");
    }
    return v;
}

int to_int(const Entry& entry, const std::string& module)
{
    int v = 0;
    const char* begin = entry.value.data();
    const char* end = begin + entry.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorKind::parse, module, where(entry) + " is not an integer: '" + entry.value + "'");
    }
    return v;
}

std::vector<double> to_double_list(const Entry& entry, const std::string& module)
{
    std::vector<double> out;
    std::string_view rest(entry.value);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        Entry item = entry;
        item.value = trim(rest.substr(0, comma));
        out.push_back(to_double(item, module));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggest(std::string_view key, std::span<const std::string_view> candidates)
{
    std::string best;
    std::size_t best_score = std::string::npos;
    for (auto c : candidates) {
        std::size_t d = edit_distance(key, c);
        // shared prefix is a strong hint ("gamma_cavity" -> "gamma_c_mev")
        std::size_t prefix = 0;
        while (prefix < key.size() && prefix < c.size() && key[prefix] == c[prefix]) ++prefix;
        const std::size_t score = d > prefix ? d - prefix : 0;
        if (score < best_score) {
            best_score = score;
            best = std::string(c);
        }
    }
    if (best.empty()) return best;
    const std::size_t limit = std::max<std::size_t>(3, key.size() / 2);
    return best_score <= limit ? best : std::string{};
}

} // namespace polblock::keyvalue
