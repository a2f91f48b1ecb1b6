#include "dslab/dslab.h"

#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "dslab/energy.hpp"
#include "dslab/errors.hpp"
#include "dslab/gronwall.hpp"
#include "dslab/scenario.hpp"

struct dsl_scenario {
    dslab::Scenario scn;
};

struct dsl_report {
    dslab::RunReport rep;
    std::string json;
    std::string summary;
};

namespace {

thread_local std::string g_last_error;

dsl_status fail(dsl_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class F>
dsl_status guarded(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const dslab::ParseError& e) {
        return fail(DSL_ERR_PARSE, e.what());
    } catch (const dslab::DomainError& e) {
        return fail(DSL_ERR_DOMAIN, e.what());
    } catch (const dslab::IntegrationError& e) {
        return fail(DSL_ERR_INTEGRATION, e.what());
    } catch (const dslab::SeedingError& e) {
        return fail(DSL_ERR_SEEDING, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(DSL_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DSL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(DSL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DSL_ERR_INTERNAL, "unknown error");
    }
}

}  // namespace

extern "C" {

const char* dsl_last_error(void) { return g_last_error.c_str(); }

const char* dsl_status_name(dsl_status status) {
    switch (status) {
        case DSL_OK: return "ok";
        case DSL_ERR_NULL: return "null argument";
        case DSL_ERR_DOMAIN: return "domain error";
        case DSL_ERR_PARSE: return "parse error";
        case DSL_ERR_INTEGRATION: return "integration error";
        case DSL_ERR_SEEDING: return "seeding error";
        case DSL_ERR_IO: return "i/o error";
        case DSL_ERR_RANGE: return "index out of range";
        case DSL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* dsl_version(void) { return "1.0.0"; }

dsl_status dsl_scenario_parse(const char* text, dsl_scenario** out) {
    if (!text || !out) return fail(DSL_ERR_NULL, "dsl_scenario_parse: null argument");
    return guarded([&] {
        *out = new dsl_scenario{dslab::parse_config(text)};
        return DSL_OK;
    });
}

dsl_status dsl_scenario_load(const char* path, dsl_scenario** out) {
    if (!path || !out) return fail(DSL_ERR_NULL, "dsl_scenario_load: null argument");
    if (!std::filesystem::exists(path)) return fail(DSL_ERR_IO, std::string("cannot read config file '") + path + "'");
    return guarded([&] {
        *out = new dsl_scenario{dslab::load_config(path)};
        return DSL_OK;
    });
}

dsl_status dsl_scenario_default(dsl_scenario** out) {
    if (!out) return fail(DSL_ERR_NULL, "dsl_scenario_default: null argument");
    return guarded([&] {
        *out = new dsl_scenario{dslab::default_scenario()};
        return DSL_OK;
    });
}

void dsl_scenario_free(dsl_scenario* scn) { delete scn; }

dsl_status dsl_scenario_hash(const dsl_scenario* scn, uint64_t* out) {
    if (!scn || !out) return fail(DSL_ERR_NULL, "dsl_scenario_hash: null argument");
    return guarded([&] {
        *out = scn->scn.hash();
        return DSL_OK;
    });
}

dsl_status dsl_scenario_set_seed(dsl_scenario* scn, uint64_t seed) {
    if (!scn) return fail(DSL_ERR_NULL, "dsl_scenario_set_seed: null argument");
    scn->scn.seed = seed;
    g_last_error.clear();
    return DSL_OK;
}

dsl_status dsl_scenario_set_grid_refine(dsl_scenario* scn, int factor) {
    if (!scn) return fail(DSL_ERR_NULL, "dsl_scenario_set_grid_refine: null argument");
    if (factor < 1 || factor > 16) return fail(DSL_ERR_DOMAIN, "grid refine factor must lie in [1, 16]");
    scn->scn.grid_refine = factor;
    g_last_error.clear();
    return DSL_OK;
}

dsl_status dsl_scenario_set_targets(dsl_scenario* scn, const char* targets) {
    if (!scn || !targets) return fail(DSL_ERR_NULL, "dsl_scenario_set_targets: null argument");
    return guarded([&] {
        std::vector<std::string> list;
        std::string cur;
        const std::string s = targets;
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ',') {
                if (!cur.empty()) {
                    if (!dslab::is_known_target(cur)) throw dslab::DomainError("unknown target '" + cur + "'");
                    list.push_back(cur);
                }
                cur.clear();
            } else if (s[i] != ' ') {
                cur += s[i];
            }
        }
        if (list.empty()) throw dslab::DomainError("no targets given");
        scn->scn.targets = list;
        return DSL_OK;
    });
}

const char* dsl_scenario_out_dir(const dsl_scenario* scn) { return scn ? scn->scn.out_dir.c_str() : ""; }

size_t dsl_target_count(void) { return dslab::known_targets().size(); }

const char* dsl_target_name(size_t index) {
    const auto& t = dslab::known_targets();
    return index < t.size() ? t[index].c_str() : nullptr;
}

dsl_status dsl_scenario_run(const dsl_scenario* scn, dsl_report** out) {
    if (!scn || !out) return fail(DSL_ERR_NULL, "dsl_scenario_run: null argument");
    return guarded([&] {
        auto* r = new dsl_report{dslab::run_scenario(scn->scn), {}, {}};
        r->json = r->rep.verdicts_json();
        r->summary = r->rep.summary();
        *out = r;
        return DSL_OK;
    });
}

void dsl_report_free(dsl_report* rep) { delete rep; }

dsl_status dsl_report_all_pass(const dsl_report* rep, int* out) {
    if (!rep || !out) return fail(DSL_ERR_NULL, "dsl_report_all_pass: null argument");
    *out = rep->rep.all_pass() ? 1 : 0;
    g_last_error.clear();
    return DSL_OK;
}

size_t dsl_report_verdict_count(const dsl_report* rep) { return rep ? rep->rep.verdicts.size() : 0; }

dsl_status dsl_report_verdict(const dsl_report* rep, size_t index, dsl_verdict_info* out) {
    if (!rep || !out) return fail(DSL_ERR_NULL, "dsl_report_verdict: null argument");
    if (index >= rep->rep.verdicts.size()) return fail(DSL_ERR_RANGE, "dsl_report_verdict: index out of range");
    const auto& v = rep->rep.verdicts[index];
    out->name = v.name.c_str();
    out->statistic = v.statistic;
    out->threshold = v.threshold;
    out->pass = v.pass ? 1 : 0;
    out->ensemble = v.ensemble.c_str();
    g_last_error.clear();
    return DSL_OK;
}

const char* dsl_report_json(const dsl_report* rep) { return rep ? rep->json.c_str() : ""; }

const char* dsl_report_summary(const dsl_report* rep) { return rep ? rep->summary.c_str() : ""; }

dsl_status dsl_report_write(const dsl_report* rep, const char* dir) {
    if (!rep || !dir) return fail(DSL_ERR_NULL, "dsl_report_write: null argument");
    try {
        g_last_error.clear();
        rep->rep.write(dir);
        return DSL_OK;
    } catch (const std::exception& e) {
        return fail(DSL_ERR_IO, e.what());
    }
}

dsl_status dsl_bessel_check(double lambda, double tau_seed, double* max_err_j, double* max_err_y) {
    if (!max_err_j || !max_err_y) return fail(DSL_ERR_NULL, "dsl_bessel_check: null argument");
    return guarded([&] {
        const auto r = dslab::bessel_agreement(lambda, tau_seed);
        *max_err_j = r.err_j;
        *max_err_y = r.err_y;
        return DSL_OK;
    });
}

dsl_status dsl_discrete_gronwall(const double* b, const double* c, size_t n, double* out) {
    if ((!b || !c || !out) && n > 0) return fail(DSL_ERR_NULL, "dsl_discrete_gronwall: null argument");
    return guarded([&] {
        const auto r = dslab::discrete_gronwall_bound(std::vector<double>(b, b + n), std::vector<double>(c, c + n));
        for (size_t i = 0; i < n; ++i) out[i] = r[i];
        return DSL_OK;
    });
}

dsl_status dsl_gronwall_verify(uint64_t seed, int count, int k_max, int points, double b_scale, int* violations,
                               double* worst_defect) {
    if (!violations || !worst_defect) return fail(DSL_ERR_NULL, "dsl_gronwall_verify: null argument");
    return guarded([&] {
        dslab::GronwallVerifyOptions opt;
        opt.k_max = k_max;
        opt.grid.points = points;
        opt.b_scale = b_scale;
        const auto v = dslab::verify_gronwall_lemma(seed, count, opt);
        *violations = v.detail["violations"].get<int>();
        *worst_defect = v.statistic;
        return DSL_OK;
    });
}

}  // extern "C"
