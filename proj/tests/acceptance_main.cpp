#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& cmd) {
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    r.status = pclose(p);
    return r;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    if (!fs::exists(root)) return files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[fs::relative(e.path(), root).generic_string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return files;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = RDCP_CLI_PATH;
    fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "rdcp_acceptance";
    fs::remove_all(work);
    fs::path a = work / "run_a", b = work / "run_b";

    auto first = run(cli + " selftest --seed 42 --out " + a.string() + " 2>&1");
    std::cout << first.out << std::flush;
    int failures = 0;
    std::istringstream lines(first.out);
    int verdicts = 0;
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("PASS", 0) == 0) ++verdicts;
        if (line.rfind("FAIL", 0) == 0) ++verdicts, ++failures;
    }
    if (verdicts != 8) {
        std::cout << "FAIL  suite: expected 8 verdict lines, got " << verdicts << '\n';
        ++failures;
    }

    auto second = run(cli + " selftest --seed 42 --out " + b.string() + " > /dev/null 2>&1");
    auto sa = snapshot(a), sb = snapshot(b);
    std::size_t differing = 0;
    for (const auto& [name, bytes] : sa) {
        auto it = sb.find(name);
        if (it == sb.end() || it->second != bytes) ++differing;
    }
    for (const auto& [name, bytes] : sb)
        if (!sa.count(name)) ++differing;
    bool same = !sa.empty() && differing == 0;
    std::cout << (same ? "PASS" : "FAIL") << "  criterion 9: Determinism (" << sa.size() << " files, " << differing
              << " differing)" << std::endl;
    if (!same) ++failures;
    return failures == 0 ? 0 : 1;
}
