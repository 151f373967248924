#include "test_support.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace testsup {

std::string data_path(const std::string &rel) {
    return std::string(FEEDMINE_DATA_DIR) + "/" + rel;
}

std::string fixture_path(const std::string &rel) {
    return std::string(FEEDMINE_FIXTURE_DIR) + "/" + rel;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string temp_dir(const std::string &tag) {
    static std::atomic<int> counter{0};
    fs::path dir = fs::temp_directory_path() /
                   ("feedmine_test_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

} // namespace testsup
