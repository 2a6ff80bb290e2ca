#include "support/golden.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace fibss::testing {

namespace {

struct Case {
    std::string name;
    int code = 0;
    std::vector<std::string> args;
};

struct Run {
    std::string out, err;
    int code = -1;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

std::vector<Case> read_cases(const fs::path& file) {
    std::vector<Case> cases;
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Case c;
        ls >> c.name >> c.code;
        for (std::string a; ls >> a;) c.args.push_back(a);
        cases.push_back(std::move(c));
    }
    return cases;
}

class Runner {
  public:
    Runner(std::string cli, fs::path cwd) : cli_(std::move(cli)), cwd_(std::move(cwd)) {
        scratch_ = fs::temp_directory_path() / ("fibss-golden-" + std::to_string(::getpid()));
        fs::create_directories(scratch_);
    }
    ~Runner() {
        std::error_code ec;
        fs::remove_all(scratch_, ec);
    }

    Run run(const std::vector<std::string>& args) const {
        std::string cmd = "cd " + quote(cwd_.string()) + " && " + quote(cli_);
        for (const auto& a : args) cmd += " " + quote(a);
        cmd += " >" + quote((scratch_ / "out").string()) + " 2>" + quote((scratch_ / "err").string());
        int status = std::system(cmd.c_str());
        Run r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(scratch_ / "out");
        r.err = slurp(scratch_ / "err");
        return r;
    }

    /// canon of a document given as text; returns the run on a scratch copy.
    Run canon_text(const std::string& text) const {
        auto p = scratch_ / "doc.json";
        spit(p, text);
        return run({"canon", p.string()});
    }

  private:
    std::string cli_;
    fs::path cwd_;
    fs::path scratch_;
};

void check_fixed_point(const Runner& runner, const std::string& label, const std::string& printed,
                       GoldenResult& res) {
    ++res.canon_checks;
    auto again = runner.canon_text(printed);
    if (again.code != 0)
        res.failures.push_back(label + ": canonical text does not parse again: " + again.err);
    else if (again.out != printed)
        res.failures.push_back(label + ": canon is not idempotent");
}

} // namespace

GoldenResult run_golden(const std::string& cli, const std::string& golden_dir, bool update) {
    GoldenResult res;
    const fs::path root(golden_dir);
    const fs::path inputs = root / "inputs", expected = root / "expected";
    Runner runner(cli, inputs);

    for (const auto& c : read_cases(root / "cases.txt")) {
        ++res.cases;
        auto first = runner.run(c.args);
        auto second = runner.run(c.args);
        if (first.out != second.out || first.err != second.err || first.code != second.code)
            res.failures.push_back(c.name + ": output differs between two runs");
        if (first.code != c.code)
            res.failures.push_back(c.name + ": exit " + std::to_string(first.code) + ", expected " +
                                   std::to_string(c.code));
        const auto out_file = expected / (c.name + ".out"), err_file = expected / (c.name + ".err");
        if (update) {
            fs::create_directories(expected);
            spit(out_file, first.out);
            if (first.err.empty())
                fs::remove(err_file);
            else
                spit(err_file, first.err);
        } else {
            if (!fs::exists(out_file))
                res.failures.push_back(c.name + ": no expected output");
            else if (slurp(out_file) != first.out)
                res.failures.push_back(c.name + ": stdout differs from " + out_file.filename().string());
            const std::string want_err = fs::exists(err_file) ? slurp(err_file) : std::string();
            if (want_err != first.err) res.failures.push_back(c.name + ": stderr differs");
        }
        if (first.code == 0 && first.out.starts_with("{")) check_fixed_point(runner, c.name, first.out, res);
    }

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(inputs))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto printed = runner.run({"canon", f.filename().string()});
        if (printed.code != 0) continue;
        check_fixed_point(runner, f.filename().string(), printed.out, res);
    }
    return res;
}

} // namespace fibss::testing
