#include "bubblelab/cli/support.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/psy/psy.hpp"

namespace bubblelab::cli {

namespace {

[[nodiscard]] std::string trim(const std::string& text) {
    std::size_t first = 0;
    std::size_t last = text.size();
    while (first < last && std::isspace(static_cast<unsigned char>(text[first])) != 0) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1])) != 0) --last;
    return text.substr(first, last - first);
}

[[nodiscard]] std::string strip_quotes(const std::string& text) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        return text.substr(1, text.size() - 2);
    }
    return text;
}

/// Reads one flat key=value config file into --key=value tokens.
[[nodiscard]] std::vector<std::string> read_config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("missing_file", "cannot open config '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw usage_error("invalid_config", "line " + std::to_string(line_no) + " of '" +
                                                    path + "' is not key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = strip_quotes(trim(stripped.substr(eq + 1)));
        if (key == "config") {
            throw usage_error("invalid_config",
                              "'config' cannot appear inside a config file ('" + path + "')");
        }
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

}  // namespace

std::vector<std::string> expand_config(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    // The subcommand is the first token that is not an option.
    std::size_t command_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i].front() != '-') {
            command_pos = i;
            break;
        }
    }
    if (command_pos == args.size()) return args;

    // The last --config wins, consistent with the take-last option policy.
    std::string config_path;
    for (std::size_t i = command_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(std::string("--config=").size());
        }
    }
    if (config_path.empty()) return args;

    const std::vector<std::string> injected = read_config_tokens(config_path);
    std::vector<std::string> expanded;
    expanded.reserve(args.size() + injected.size());
    expanded.insert(expanded.end(), args.begin(), args.begin() + static_cast<long>(command_pos) + 1);
    expanded.insert(expanded.end(), injected.begin(), injected.end());
    expanded.insert(expanded.end(), args.begin() + static_cast<long>(command_pos) + 1, args.end());
    return expanded;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& notes,
                    const std::vector<ManifestEntry>& entries) {
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / (command + "_manifest.txt");
    std::ofstream out(path);
    if (!out) throw data_error("write_failed", "cannot write '" + path.string() + "'");
    out << "# bubblelab " << kToolVersion << " run manifest\n";
    out << "# command=" << command << "\n";
    out << "# rerun with: bubblelab " << command << " --config " << command << "_manifest.txt\n";
    for (const std::string& note : notes) out << "# " << note << "\n";
    for (const ManifestEntry& entry : entries) out << entry.key << "=" << entry.value << "\n";
    if (!out) throw data_error("write_failed", "error writing '" + path.string() + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    if (trim(text).empty()) return items;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t comma = text.find(',', begin);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        const std::string item = trim(text.substr(begin, end - begin));
        if (item.empty()) {
            throw usage_error("invalid_config", "empty item in list '" + text + "'");
        }
        items.push_back(item);
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return items;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& context) {
    std::vector<double> values;
    for (const std::string& item : split_list(text)) {
        values.push_back(csv::parse_double(item, context));
    }
    return values;
}

long parse_index(const std::string& text, const std::string& context) {
    long value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw usage_error("invalid_config",
                          "cannot parse integer '" + text + "' for " + context);
    }
    return value;
}

double resolve_r0(const std::string& text, std::size_t T) {
    if (text == "auto") return psy::default_r0(T);
    return csv::parse_double(text, "--r0");
}

}  // namespace bubblelab::cli
