#pragma once

#include <string>

namespace testsup {

// Path of a file under the repository data/ directory.
std::string data_path(const std::string &rel);

// Path of a file under tests/fixtures/.
std::string fixture_path(const std::string &rel);

std::string slurp(const std::string &path);

// Fresh scratch directory (created on call) under the process temp dir.
std::string temp_dir(const std::string &tag);

} // namespace testsup
