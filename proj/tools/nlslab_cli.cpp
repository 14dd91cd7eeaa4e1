#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlslab/nlslab.h"

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    int threads = 0;
};

int exit_code(nlslab_status s) {
    switch (s) {
        case NLSLAB_OK: return 0;
        case NLSLAB_ERR_VALIDATION: return 2;
        case NLSLAB_ERR_CAP: return 3;
        case NLSLAB_ERR_SINGULAR: return 4;
        default: return 1;
    }
}

int run(const std::string& experiment, const Options& o) {
    std::string text;
    if (!o.config.empty()) {
        std::ifstream f(o.config);
        if (!f) {
            std::cerr << "error: cannot read config '" << o.config << "'\n";
            return 2;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    nlslab_report* rep = nullptr;
    nlslab_status st = nlslab_run(experiment.c_str(), text.c_str(), o.seed, o.threads, &rep);
    if (st != NLSLAB_OK) {
        std::cerr << "error: " << nlslab_last_error() << "\n";
        return exit_code(st);
    }
    if (!o.out.empty()) {
        st = nlslab_report_write(rep, o.format.c_str(), o.out.c_str());
    } else {
        char* s = nullptr;
        st = nlslab_report_serialize(rep, o.format.c_str(), &s);
        if (st == NLSLAB_OK) std::fwrite(s, 1, std::char_traits<char>::length(s), stdout);
        nlslab_string_free(s);
    }
    nlslab_report_free(rep);
    if (st != NLSLAB_OK) std::cerr << "error: " << nlslab_last_error() << "\n";
    return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for the quintic NLS on the torus"};
    app.set_version_flag("--version", std::string(nlslab_version()));
    app.require_subcommand(1);

    Options opt;
    std::string chosen;
    auto* list = app.add_subcommand("list", "List experiments and their parameters with defaults");
    for (std::size_t i = 0; i < nlslab_experiment_count(); ++i) {
        std::string id = nlslab_experiment_id(i);
        auto* sub = app.add_subcommand(id, "Run the " + id + " experiment");
        sub->add_option("--config", opt.config, "Key = value parameter file")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "64-bit seed")->capture_default_str();
        sub->add_option("--out", opt.out, "Output path (stdout when omitted)");
        sub->add_option("--format", opt.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        sub->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->callback([&chosen, id] { chosen = id; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (std::size_t i = 0; i < nlslab_experiment_count(); ++i) {
            const char* id = nlslab_experiment_id(i);
            char* schema = nullptr;
            nlslab_experiment_schema(id, &schema);
            std::cout << id << "\n";
            std::istringstream lines(schema ? schema : "");
            for (std::string l; std::getline(lines, l);) std::cout << "  " << l << "\n";
            nlslab_string_free(schema);
        }
        return 0;
    }
    return run(chosen, opt);
}
