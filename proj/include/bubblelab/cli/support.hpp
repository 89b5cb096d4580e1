#pragma once

/// Front-end plumbing shared by the command-line tool and its tests: flat
/// key=value config expansion, run manifests that double as rerun configs,
/// and small option-parsing helpers.

#include <cstddef>
#include <string>
#include <vector>

namespace bubblelab::cli {

/// Tool version string echoed in manifests and --version output.
inline constexpr const char* kToolVersion = "1.0.0";

/// Expands `--config FILE` into explicit `--key=value` tokens.
///
/// Returns the argument list (program name excluded) with the config file's
/// entries spliced in directly after the subcommand token, so options typed
/// on the command line come later and win under the parser's take-last
/// policy. Config files are flat `key=value` lines; blank lines and lines
/// starting with '#' are skipped; values may be wrapped in double quotes;
/// the key `config` cannot appear inside a file. Keys are validated against
/// the chosen command's options downstream in the parser, before any
/// computation starts.
[[nodiscard]] std::vector<std::string> expand_config(int argc, const char* const* argv);

/// One resolved `key=value` manifest line. Keys are long option names of the
/// command (without the leading dashes).
struct ManifestEntry {
    std::string key;
    std::string value;
};

/// Writes `<out_dir>/<command>_manifest.txt`: a comment preamble (tool
/// version, command, rerun hint, any informational notes such as a date
/// mapping) followed by one `key=value` line per resolved parameter. The
/// file is itself a valid `--config` for the same command, and its content
/// depends only on the resolved parameters, so a rerun reproduces it
/// byte-for-byte.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& notes,
                    const std::vector<ManifestEntry>& entries);

/// Splits a comma-separated list, trimming ASCII whitespace around items.
/// An empty input gives an empty vector; empty items are errors.
[[nodiscard]] std::vector<std::string> split_list(const std::string& text);

/// Parses a comma-separated list of numbers; `context` names the option in
/// error messages.
[[nodiscard]] std::vector<double> parse_double_list(const std::string& text,
                                                    const std::string& context);

/// Strict integer parse for index-valued options.
[[nodiscard]] long parse_index(const std::string& text, const std::string& context);

/// "auto" resolves to the default minimum-window fraction for a sample of
/// length T; anything else must parse as a number.
[[nodiscard]] double resolve_r0(const std::string& text, std::size_t T);

}  // namespace bubblelab::cli
