#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "test_support.hpp"

namespace fba::test {

std::string temp_dir() {
    static std::string dir = [] {
        auto base = std::filesystem::temp_directory_path() / "fba_tests";
        std::filesystem::create_directories(base);
        return base.string();
    }();
    return dir;
}

}  // namespace fba::test
