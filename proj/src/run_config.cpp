#include "ctm/run_config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <string_view>

#include "ctm/csv.hpp"
#include "ctm/errors.hpp"

namespace ctm {

namespace {

struct Field {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw UsageError("config key `" + key + "`: cannot parse `" + text + "`");
    return value;
}

template <typename T>
Field number_field(const char* key, T RunConfig::*member) {
    return Field{
        key,
        [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
                return csv::format_double(c.*member);
            else
                return std::to_string(c.*member);
        },
        [key, member](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); },
    };
}

Field text_field(const char* key, std::string RunConfig::*member) {
    return Field{
        key,
        [member](const RunConfig& c) { return c.*member; },
        [member](RunConfig& c, const std::string& v) { c.*member = v; },
    };
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        text_field("command", &RunConfig::command),
        number_field("N", &RunConfig::N),
        number_field("n", &RunConfig::n),
        number_field("eps", &RunConfig::eps),
        number_field("u0", &RunConfig::u0),
        number_field("kappa", &RunConfig::kappa),
        number_field("kappa_s", &RunConfig::kappa_s),
        number_field("v", &RunConfig::v),
        number_field("fixed_u", &RunConfig::fixed_u),
        number_field("beta", &RunConfig::beta),
        number_field("perturbed", &RunConfig::perturbed),
        number_field("seed", &RunConfig::seed),
        number_field("dt", &RunConfig::dt),
        number_field("t_end", &RunConfig::t_end),
        number_field("record_every", &RunConfig::record_every),
        number_field("settle_time", &RunConfig::settle_time),
        text_field("method", &RunConfig::method),
        text_field("out", &RunConfig::out),
        number_field("n_min", &RunConfig::n_min),
        number_field("n_max", &RunConfig::n_max),
        number_field("u_min", &RunConfig::u_min),
        number_field("u_max", &RunConfig::u_max),
        number_field("u_steps", &RunConfig::u_steps),
        text_field("edges", &RunConfig::edges),
        text_field("thresholds", &RunConfig::thresholds),
        text_field("seeds", &RunConfig::seeds),
    };
    return table;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> RunConfig::header_lines() const {
    std::vector<std::string> lines;
    for (const auto& f : fields()) lines.push_back(std::string(f.key) + "=" + f.get(*this));
    return lines;
}

std::string RunConfig::to_text() const {
    std::string text;
    for (const auto& line : header_lines()) text += line + "\n";
    return text;
}

RunConfig RunConfig::from_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        bool known = false;
        for (const auto& f : fields()) {
            if (key == f.key) {
                f.set(base, value);
                known = true;
                break;
            }
        }
        if (!known) throw UsageError("config line " + std::to_string(line_no) + ": unknown key `" + key + "`");
    }
    return base;
}

RunConfig RunConfig::from_text(const std::string& text) { return from_text(text, RunConfig{}); }

}  // namespace ctm
