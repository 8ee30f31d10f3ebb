#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mtaudit/corpus.hpp"

namespace mtaudit::cli {

// args[0] is the program name. Returns the process exit code: 0 success,
// 1 validation or usage error, 2 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Language tag from an explicit flag, else from the file name: a component
// that is already a tag ("kac_Latn.dev"), else a bare ISO 639-3 code
// ("kac.dev" -> "kac_Latn"). Throws ValidationError when neither applies.
LanguageTag infer_tag(const std::filesystem::path& file, const std::optional<std::string>& explicit_tag);
// "dev" / "devtest" file name components select that split; else Custom.
Split infer_split(const std::filesystem::path& file);

}  // namespace mtaudit::cli
