// cmfiber command-line tool. Talks to the library only through cmfiber.h.
#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmfiber/cmfiber.h"

using json = nlohmann::json;

namespace {

enum exit_code { exit_ok = 0, exit_check = 1, exit_input = 2, exit_resource = 3 };

// Carries a library status up to main, which maps it to an exit code.
struct api_failure {
    int status;
    std::string message;
};

void call(int status)
{
    if (status != CMF_OK)
        throw api_failure{status, cmf_last_error()};
}

int exit_for(int status)
{
    switch (status) {
    case CMF_ERR_INVALID:
    case CMF_ERR_HYPOTHESIS:
    case CMF_ERR_NULL:
    case CMF_ERR_RANGE:
        return exit_input;
    case CMF_ERR_RESOURCE:
        return exit_resource;
    default:
        return exit_check;
    }
}

template <class T, void (*Free)(T *)>
struct deleter {
    void operator()(T * p) const { Free(p); }
};
using report_ptr = std::unique_ptr<cmf_report, deleter<cmf_report, cmf_report_free>>;
using context_ptr = std::unique_ptr<cmf_context, deleter<cmf_context, cmf_context_free>>;
using census_ptr = std::unique_ptr<cmf_census, deleter<cmf_census, cmf_census_free>>;

struct check_list {
    json items = json::array();
    bool ok = true;

    void add(std::string name, bool pass, std::string expected, std::string actual)
    {
        ok = ok && pass;
        items.push_back({{"name", std::move(name)},
                         {"pass", pass},
                         {"expected", std::move(expected)},
                         {"actual", std::move(actual)}});
    }

    void add(cmf_report const * r)
    {
        size_t n = 0;
        call(cmf_report_check_count(r, &n));
        for (size_t i = 0; i < n; ++i) {
            char const *name, *exp, *act;
            int pass;
            call(cmf_report_check(r, i, &name, &pass, &exp, &act));
            add(name, pass != 0, exp, act);
        }
    }
};

void emit(std::string const & command, json inputs, json outputs, check_list const & checks)
{
    json report = {{"schema", 1},
                   {"command", command},
                   {"inputs", std::move(inputs)},
                   {"outputs", std::move(outputs)},
                   {"checks", checks.items}};
    std::cout << report.dump(2) << '\n';
}

std::string csv_field(std::string const & s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + '"';
}

void csv_row(std::vector<std::string> const & fields)
{
    for (size_t i = 0; i < fields.size(); ++i)
        std::cout << (i ? "," : "") << csv_field(fields[i]);
    std::cout << "\r\n";
}

// ---- local-count ----

struct local_args {
    std::int64_t p = 0;
    std::string kind;
    unsigned nprime = 0, ndouble = 0, delta = 0;
    bool brute = false;
};

int run_local(local_args const & a)
{
    cmf_kind kind;
    call(cmf_parse_kind(a.kind.c_str(), &kind));
    std::uint64_t closed = 0;
    call(cmf_closed_form_n(static_cast<std::uint64_t>(a.p), kind, a.nprime, a.ndouble, a.delta,
                           &closed));
    json inputs = {{"p", a.p},         {"kind", a.kind},   {"nprime", a.nprime},
                   {"ndouble", a.ndouble}, {"delta", a.delta}, {"brute", a.brute}};
    json outputs = {{"closed_form", closed}};
    check_list checks;
    if (a.brute) {
        std::uint64_t brute = 0;
        call(cmf_brute_force_n(a.p, kind, a.nprime, a.ndouble, a.delta, 0, 1, &brute));
        outputs["brute_force"] = brute;
        checks.add("closed form equals enumeration", closed == brute, std::to_string(brute),
                   std::to_string(closed));
    }
    emit("local-count", inputs, outputs, checks);
    return checks.ok ? exit_ok : exit_check;
}

// ---- kappa ----

struct kappa_args {
    std::int64_t dk = 0, cprime = 1, cdouble = 1, level = 1;
    std::vector<std::int64_t> ram, s;
};

int run_kappa(kappa_args const & a)
{
    cmf_context * raw = nullptr;
    call(cmf_context_create(a.dk, a.ram.data(), a.ram.size(), a.level, a.s.data(), a.s.size(),
                            &raw));
    context_ptr ctx(raw);

    cmf_consistency cons{};
    cmf_report * rraw = nullptr;
    call(cmf_theorem_consistency(ctx.get(), a.cprime, a.cdouble, &cons, &rraw));
    report_ptr rep(rraw);

    std::vector<std::int64_t> primes(a.s.size());
    std::vector<int> bits(a.s.size());
    size_t nbits = 0;
    call(cmf_sign_vector(ctx.get(), a.cprime, a.cdouble, nullptr, nullptr, 0, primes.data(),
                         bits.data(), primes.size(), &nbits));
    json signs = json::object();
    for (size_t i = 0; i < nbits && i < primes.size(); ++i)
        signs[std::to_string(primes[i])] = bits[i];

    json inputs = {{"dk", a.dk},       {"cprime", a.cprime}, {"cdouble", a.cdouble},
                   {"level", a.level}, {"ram", a.ram},       {"s", a.s}};
    json outputs = {{"kappa", cons.kappa.value},
                    {"ring_class_degree", cons.kappa.degree},
                    {"s_local_product", cons.kappa.s_local},
                    {"empty_fiber", cons.kappa.empty_fiber != 0},
                    {"orbit_count_b", cons.count_b},
                    {"orbit_count_bs", cons.count_bs},
                    {"sign_classes", cons.sign_classes},
                    {"class_number", cons.h_coarse},
                    {"class_number_prime_to_s", cons.h_coarse_s},
                    {"source_fiber_size", cons.source_size},
                    {"target_fiber_size", cons.target_size},
                    {"sign_vector", signs}};
    check_list checks;
    checks.add(rep.get());
    emit("kappa", inputs, outputs, checks);
    return checks.ok ? exit_ok : exit_check;
}

// ---- embeddings ----

struct embed_args {
    std::int64_t ell = 0, level = 1, dk = 0, c = 1;
    bool csv = false;
};

json row_json(cmf_census_row const & r, bool signs)
{
    json j = {{"unit_count", r.unit_count}, {"elements", r.elements},
              {"classes", r.classes},       {"pairs", r.pairs},
              {"self_paired", r.self_paired}};
    if (signs) {
        j["sign0"] = r.sign0;
        j["sign1"] = r.sign1;
    }
    return j;
}

std::vector<std::string> row_fields(std::string const & label, cmf_census_row const & r,
                                    bool signs)
{
    auto s = [](std::int64_t v) { return std::to_string(v); };
    return {label,          s(r.unit_count),  s(r.elements),
            s(r.classes),   s(r.pairs),       s(r.self_paired),
            signs ? s(r.sign0) : "", signs ? s(r.sign1) : ""};
}

int run_embeddings(embed_args const & a)
{
    cmf_census * raw = nullptr;
    call(cmf_census_create(a.ell, a.level, a.dk, a.c, &raw));
    census_ptr cen(raw);
    cmf_census_info info{};
    call(cmf_census_info_get(cen.get(), &info));
    size_t nrows = 0;
    call(cmf_census_row_count(cen.get(), &nrows));
    std::vector<cmf_census_row> rows(nrows);
    for (size_t i = 0; i < nrows; ++i)
        call(cmf_census_row_get(cen.get(), i, &rows[i]));
    cmf_report const * rep = nullptr;
    call(cmf_census_checks(cen.get(), &rep));
    check_list checks;
    checks.add(rep);
    bool const signs = info.signs_defined != 0;

    if (a.csv) {
        csv_row({"ideal_class", "unit_count", "elements", "classes", "pairs", "self_paired",
                 "sign0", "sign1"});
        for (auto const & r : rows)
            csv_row(row_fields(std::to_string(r.ideal_class), r, signs));
        csv_row(row_fields("total", info.totals, signs));
    } else {
        json jrows = json::array();
        for (auto const & r : rows) {
            json j = row_json(r, signs);
            j["ideal_class"] = r.ideal_class;
            jrows.push_back(std::move(j));
        }
        json inputs = {{"ell", a.ell}, {"level", a.level}, {"dk", a.dk}, {"c", a.c}};
        json outputs = {{"ideal_classes", info.ideal_classes},
                        {"rows", jrows},
                        {"totals", row_json(info.totals, signs)},
                        {"expected_total", info.expected_total},
                        {"signs_defined", signs}};
        emit("embeddings", inputs, outputs, checks);
    }
    if (!checks.ok && a.csv)
        std::cerr << "census check failed\n";
    return checks.ok ? exit_ok : exit_check;
}

// ---- verify ----

struct verify_args {
    std::string suite = "all";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

int run_verify(verify_args const & a)
{
    cmf_report * raw = nullptr;
    call(cmf_verify_run(a.suite.c_str(), a.seed, a.jobs, &raw));
    report_ptr rep(raw);
    check_list checks;
    checks.add(rep.get());
    size_t failed = 0;
    for (auto const & c : checks.items)
        if (!c["pass"].get<bool>()) {
            if (failed == 0)
                std::cerr << "first failure: " << c["name"].get<std::string>()
                          << ": expected " << c["expected"].get<std::string>() << ", got "
                          << c["actual"].get<std::string>() << '\n';
            ++failed;
        }
    json inputs = {{"suite", a.suite}, {"seed", a.seed}, {"jobs", a.jobs}};
    json outputs = {{"checks_total", checks.items.size()},
                    {"checks_failed", failed},
                    {"all_pass", checks.ok}};
    emit("verify", inputs, outputs, checks);
    return checks.ok ? exit_ok : exit_check;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Orbit counts, multiplicities and optimal-embedding censuses"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cmf_version()));

    local_args la;
    auto * local = app.add_subcommand("local-count", "orbit count N(n', n'', delta) at one prime");
    local->add_option("--p", la.p, "residue characteristic (prime)")->required();
    local->add_option("--kind", la.kind, "local behaviour of K")
        ->required()
        ->check(CLI::IsMember({"split", "inert", "ramified"}));
    local->add_option("--nprime", la.nprime, "conductor exponent n'")->required();
    local->add_option("--ndouble", la.ndouble, "conductor exponent n''")->required();
    local->add_option("--delta", la.delta, "distance")->required();
    local->add_flag("--brute", la.brute, "also enumerate the sphere and compare");

    kappa_args ka;
    auto * kap = app.add_subcommand("kappa", "fiber multiplicity and orbit-count consistency");
    kap->add_option("--dk", ka.dk, "fundamental discriminant of K")->required();
    kap->add_option("--cprime", ka.cprime, "conductor c'")->required();
    kap->add_option("--cdouble", ka.cdouble, "conductor c''")->required();
    kap->add_option("--level", ka.level, "Eichler level")->default_val(1);
    kap->add_option("--ram", ka.ram, "finite ramified primes of B")->delimiter(',');
    kap->add_option("--s", ka.s, "the prime set S")->delimiter(',');

    embed_args ea;
    auto * emb = app.add_subcommand("embeddings", "optimal-embedding census");
    emb->add_option("--ell", ea.ell, "ramified prime of the definite algebra")->required();
    emb->add_option("--level", ea.level, "Eichler level")->default_val(1);
    emb->add_option("--dk", ea.dk, "fundamental discriminant of K")->required();
    emb->add_option("--c", ea.c, "conductor")->default_val(1);
    auto * fjson = emb->add_flag("--json", "JSON output (default)");
    emb->add_flag("--csv", ea.csv, "CSV table output")->excludes(fjson);

    verify_args va;
    auto * ver = app.add_subcommand("verify", "run the self-verification suite");
    ver->add_option("--suite", va.suite, "suite to run")
        ->default_val("all")
        ->check(CLI::IsMember({"local", "orbits", "quaternion", "all"}));
    ver->add_option("--seed", va.seed, "seed for sampled cases")->default_val(0);
    ver->add_option("--jobs", va.jobs, "worker threads")->default_val(1)->check(
        CLI::Range(1u, 256u));

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const & e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const & e) {
        return app.exit(e);
    } catch (CLI::CallForVersion const & e) {
        return app.exit(e);
    } catch (CLI::ParseError const & e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (*local)
            return run_local(la);
        if (*kap)
            return run_kappa(ka);
        if (*emb)
            return run_embeddings(ea);
        return run_verify(va);
    } catch (api_failure const & f) {
        std::cerr << "error (" << cmf_status_name(f.status) << "): " << f.message << '\n';
        return exit_for(f.status);
    } catch (std::exception const & e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_check;
    }
}
