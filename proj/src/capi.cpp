#include "nlslab/nlslab.h"

#include <cstring>
#include <fstream>
#include <string>

#include "experiments.hpp"
#include "imethod.hpp"
#include "util.hpp"

struct nlslab_report {
    nlslab::experiments::Report report;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s) {
    char* p = new char[s.size() + 1];
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

template <class Fn>
nlslab_status guarded(Fn&& fn) {
    last_error.clear();
    try {
        fn();
        return NLSLAB_OK;
    } catch (const nlslab::ValidationError& e) {
        last_error = e.what();
        return NLSLAB_ERR_VALIDATION;
    } catch (const nlslab::CapExceeded& e) {
        last_error = e.what();
        return NLSLAB_ERR_CAP;
    } catch (const nlslab::imethod::SingularSymbol& e) {
        last_error = e.what();
        return NLSLAB_ERR_SINGULAR;
    } catch (const std::exception& e) {
        last_error = e.what();
        return NLSLAB_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return NLSLAB_ERR_INTERNAL;
    }
}

std::string serialize(const nlslab_report* r, const char* format) {
    nlslab::require(r != nullptr, "null report");
    const std::string f = format ? format : "json";
    if (f == "json") return nlslab::experiments::to_json(r->report);
    if (f == "csv") return nlslab::experiments::to_csv(r->report);
    throw nlslab::ValidationError("format: expected json or csv, got '" + f + "'");
}

}  // namespace

extern "C" {

const char* nlslab_version(void) {
    static const std::string v = nlslab::experiments::version();
    return v.c_str();
}

size_t nlslab_experiment_count(void) { return nlslab::experiments::experiment_ids().size(); }

const char* nlslab_experiment_id(size_t i) {
    const auto& ids = nlslab::experiments::experiment_ids();
    return i < ids.size() ? ids[i].c_str() : nullptr;
}

nlslab_status nlslab_experiment_schema(const char* experiment, char** out) {
    return guarded([&] {
        nlslab::require(experiment && out, "null argument");
        std::string s;
        for (const auto& [k, v] : nlslab::experiments::experiment_schema(experiment)) s += k + "=" + v + "\n";
        *out = dup(s);
    });
}

nlslab_status nlslab_run(const char* experiment, const char* config_text, uint64_t seed, int threads,
                         nlslab_report** out) {
    return guarded([&] {
        nlslab::require(experiment && out, "null argument");
        *out = nullptr;
        auto cfg = nlslab::experiments::parse_config_text(config_text ? config_text : "");
        auto rep = nlslab::experiments::run(experiment, cfg, seed, threads > 0 ? threads : nlslab::default_threads());
        *out = new nlslab_report{std::move(rep)};
    });
}

size_t nlslab_report_row_count(const nlslab_report* r) { return r ? r->report.rows.size() : 0; }

double nlslab_report_wall_ms(const nlslab_report* r) { return r ? r->report.wall_ms : 0.0; }

nlslab_status nlslab_report_serialize(const nlslab_report* r, const char* format, char** out) {
    return guarded([&] {
        nlslab::require(out != nullptr, "null argument");
        *out = dup(serialize(r, format));
    });
}

nlslab_status nlslab_report_write(const nlslab_report* r, const char* format, const char* path) {
    return guarded([&] {
        nlslab::require(path != nullptr, "null path");
        auto text = serialize(r, format);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        nlslab::require(f.good(), std::string("cannot open '") + path + "' for writing");
        f << text;
        f.flush();
        nlslab::require(f.good(), std::string("write to '") + path + "' failed");
    });
}

void nlslab_report_free(nlslab_report* r) { delete r; }

void nlslab_string_free(char* s) { delete[] s; }

const char* nlslab_last_error(void) { return last_error.c_str(); }
}
