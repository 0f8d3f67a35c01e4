#include <catch2/catch_amalgamated.hpp>

#include <hillspec/report.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace hillspec;
using namespace hillspec::report;
using Catch::Approx;

namespace {

ReportEnvelope sample_envelope() {
    ReportEnvelope e;
    e.timestamp = "2026-01-01T00:00:00Z";
    e.config = {{"command", "demo"}, {"potential", "mathieu"}};
    e.warnings = {"first warning", "second, with a comma"};
    Table t;
    t.kind = "demo";
    t.add_meta("note", "value with = sign");
    t.columns = {{"n", vtype_t::integer},
                 {"lambda", vtype_t::complex_num},
                 {"delta", vtype_t::real},
                 {"ok", vtype_t::boolean},
                 {"label", vtype_t::text}};
    t.add_row({Value::integer(4), Value::complex_num(cplx(16.25, -0.5)), Value::real(1e-12),
               Value::boolean(true), Value::text("plain")});
    t.add_row({Value::integer(6), Value::complex_num(cplx(36.0, 0.0)), Value::real(0.25),
               Value::boolean(false), Value::text("quote \"x\", comma")});
    e.sections.push_back(t);
    Table empty;
    empty.kind = "empty-section";
    empty.columns = {{"k", vtype_t::integer}};
    e.sections.push_back(empty);
    return e;
}

std::string meta_get(const Table& t, const std::string& key) {
    for (const auto& [k, v] : t.meta)
        if (k == key) return v;
    throw std::runtime_error("missing meta key " + key);
}

struct CliResult {
    int code;
    std::string out;
};

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    const char* bin = std::getenv("HILLSPEC_BIN");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

} // namespace

TEST_CASE("typed cells", "[report]") {
    REQUIRE(Value::integer(3) == Value::integer(3));
    REQUIRE_FALSE(Value::integer(3) == Value::real(3.0));
    REQUIRE(Value::text("a") == Value::text("a"));
    REQUIRE_THROWS_AS(Value::real(std::nan("")), compute_error);
    REQUIRE_THROWS_AS(Value::real(1.0 / 0.0), compute_error);
    REQUIRE_THROWS_AS(Value::complex_num(cplx(0.0, std::nan(""))), compute_error);

    Table t;
    t.kind = "x";
    t.columns = {{"a", vtype_t::integer}, {"b", vtype_t::real}};
    REQUIRE_THROWS_AS(t.add_row({Value::integer(1)}), config_error);
    REQUIRE_THROWS_AS(t.add_row({Value::integer(1), Value::integer(2)}), config_error);
    REQUIRE_NOTHROW(t.add_row({Value::integer(1), Value::real(2.0)}));

    REQUIRE(to_string(vtype_t::complex_num) == "complex");
    REQUIRE(parse_vtype("bool") == vtype_t::boolean);
    REQUIRE_THROWS_AS(parse_vtype("float"), config_error);
}

TEST_CASE("JSON round trip", "[report]") {
    auto e = sample_envelope();
    auto text = to_json_text(e);
    auto back = from_json_text(text);
    REQUIRE(back == e);
    REQUIRE(to_json_text(back) == text); // stable serialization

    auto j = nlohmann::ordered_json::parse(text);
    REQUIRE(j["schema_version"] == "1.0");
    REQUIRE(j["config"]["potential"] == "mathieu");
    REQUIRE(j["payload"][0]["rows"][0][1]["re"] == 16.25);
    REQUIRE(j["payload"][0]["rows"][0][1]["im"] == -0.5);
    REQUIRE(j["payload"][1]["rows"].empty());

    SECTION("malformed input") {
        REQUIRE_THROWS_AS(from_json_text("{not json"), config_error);
        REQUIRE_THROWS_AS(from_json_text("{\"schema_version\":\"1.0\"}"), config_error);
        // a row narrower than the columns
        auto bad = j;
        bad["payload"][0]["rows"][0].erase(4);
        REQUIRE_THROWS_AS(from_json_text(bad.dump()), config_error);
    }
}

TEST_CASE("CSV round trip", "[report]") {
    auto e = sample_envelope();
    auto text = to_csv_text(e);
    auto back = from_csv_text(text);
    REQUIRE(back == e);
    REQUIRE(to_csv_text(back) == text);

    SECTION("complex columns are split into _re/_im") {
        REQUIRE(text.find("n,lambda_re,lambda_im,delta,ok,label") != std::string::npos);
        REQUIRE(text.find("#types=int,complex,real,bool,text") != std::string::npos);
        REQUIRE(text.find("\"quote \"\"x\"\", comma\"") != std::string::npos);
        REQUIRE(text.find("#warning=second, with a comma") != std::string::npos);
    }
    SECTION("malformed input") {
        REQUIRE_THROWS_AS(from_csv_text("#timestamp=t\n"), config_error); // no version
        REQUIRE_THROWS_AS(from_csv_text("#schema_version=1.0\n#mystery=1\n"), config_error);
        REQUIRE_THROWS_AS(
            from_csv_text("#schema_version=1.0\n\n#kind=x\n#types=bool\nok\nmaybe\n"),
            config_error);
        REQUIRE_THROWS_AS(
            from_csv_text("#schema_version=1.0\n\n#kind=x\n#types=complex\nz_re,z_imag\n"),
            config_error);
        REQUIRE_THROWS_AS(
            from_csv_text("#schema_version=1.0\n\n#kind=x\n#types=int\nk\n1,2\n"),
            config_error);
        REQUIRE_THROWS_AS(from_csv_text("#schema_version=1.0\n\n#kind=x\nk\n"), config_error);
    }
}

TEST_CASE("table converters", "[report]") {
    SECTION("riesz tables carry the verdict and optional columns") {
        diagnostics::RieszReport rep;
        rep.criterion = diagnostics::criterion_t::crit1;
        rep.parity = diagnostics::parity_t::even;
        rep.n_min = 10;
        rep.n_max = 14;
        rep.n_values = {10, 12, 14};
        rep.t_values = {1.0, 1.1, 1.05};
        rep.comparability = {1.2, 1.3, 1.25};
        rep.verdict = diagnostics::verdict_t::basis;
        rep.vote = diagnostics::vote_t::basis;
        rep.sup_estimate = 1.1;
        auto t = riesz_table(rep);
        REQUIRE(t.kind == "riesz");
        REQUIRE(meta_get(t, "criterion") == "crit1");
        REQUIRE(meta_get(t, "verdict") == "basis");
        REQUIRE(t.columns.size() == 3);
        REQUIRE(t.rows.size() == 3);

        rep.criterion = diagnostics::criterion_t::makin;
        rep.comparability.clear();
        rep.window = 3.0;
        rep.ratio_min = 0.4;
        rep.ratio_max = 0.5;
        auto tm = riesz_table(rep);
        REQUIRE(tm.columns.size() == 2);
        REQUIRE(meta_get(tm, "window") == "3");
        REQUIRE(meta_get(tm, "ratio_min") == "0.4");
    }
    SECTION("degenerate asymptotic rows are flagged, not propagated") {
        diagnostics::AsymptoticTable tab;
        tab.law = diagnostics::law_t::dev_mid_61_7;
        tab.refused = true;
        tab.converging = false;
        tab.converging_mod = false;
        tab.tol = 0.2;
        diagnostics::AsymRow row;
        row.n = 10;
        row.label = "mid";
        row.lhs = cplx(1.0, 0.0);
        row.rhs = cplx(0.0, 0.0);
        row.degenerate = true;
        row.ratio = cplx(std::nan(""), 0.0);
        row.ratio_mod = std::nan("");
        tab.rows.push_back(row);
        auto t = asym_table(tab);
        REQUIRE(meta_get(t, "refused") == "true");
        REQUIRE(t.rows[0][4].z == cplx(0.0, 0.0));
        REQUIRE(t.rows[0][5].d == 0.0);
        REQUIRE(t.rows[0][6].b);
        auto d = deviation_summary_table(tab);
        REQUIRE(d.rows.empty());
    }
    SECTION("angle table notes unresolved indices only when present") {
        diagnostics::AngleReport rep;
        rep.rows = {{2, 1.0, 1.0}};
        rep.max_t = 1.0;
        rep.min_angle = 1.0;
        rep.t_bounded = true;
        rep.angle_bounded_below = true;
        rep.consistent = true;
        auto t = angle_table(rep);
        REQUIRE_THROWS(meta_get(t, "skipped"));
        rep.skipped = {8, 10};
        auto ts = angle_table(rep);
        REQUIRE(meta_get(ts, "skipped") == "8,10");
    }
    SECTION("empty discs produce a placeholder spectrum row") {
        matrix_spectra::DiscMatch m;
        m.n = 1;
        m.expected = 2;
        m.eigenvalues = {};
        m.cluster_multiplicity = 0;
        m.matched = false;
        auto t = spectrum_table({m}, matrix_spectra::bc_t::per_minus, 80);
        REQUIRE(t.rows.size() == 1);
        REQUIRE(t.rows[0][1].i == -1);
        REQUIRE(t.rows[0][4].i == 0);
        REQUIRE_FALSE(t.rows[0][6].b);
    }
    SECTION("per-term table is indexed from one") {
        functionals::BetaEval be{};
        be.n = 5;
        be.s11 = {cplx(1, 0), cplx(2, 0)};
        be.s12 = {cplx(0, 0), cplx(0, 1)};
        be.s21 = {cplx(0, 0), cplx(0, -1)};
        auto t = beta_terms_table(be);
        REQUIRE(t.rows.size() == 2);
        REQUIRE(t.rows[0][0].i == 1);
        REQUIRE(t.rows[1][0].i == 2);
        REQUIRE(meta_get(t, "n") == "5");
    }
}

TEST_CASE("command line: spectrum formats agree", "[cli]") {
    std::string base = "spectrum --potential mathieu --bc per+ --n-min 2 --n-max 5 "
                       "--trunc 60 --tol 1e-10";
    auto js = run_cli(base + " --out json");
    REQUIRE(js.code == 0);
    auto ej = from_json_text(js.out);
    REQUIRE(ej.schema_version == "1.0");
    REQUIRE(ej.warnings.empty());
    REQUIRE(ej.sections.size() == 1);
    const auto& t = ej.sections[0];
    REQUIRE(t.kind == "spectrum");
    REQUIRE(meta_get(t, "bc") == "per+");
    // parity filter: only the even discs are reported for per+
    std::vector<long long> seen;
    for (const auto& row : t.rows) seen.push_back(row[0].i);
    REQUIRE(seen == std::vector<long long>{2, 2, 4, 4});
    REQUIRE(t.rows[0][2].z.real() == Approx(3.917024772998).margin(1e-6));
    REQUIRE(t.rows[1][2].z.real() == Approx(4.371300982735).margin(1e-6));
    for (const auto& row : t.rows) REQUIRE(row[6].b);

    auto cs = run_cli(base + " --out csv");
    REQUIRE(cs.code == 0);
    auto ec = from_csv_text(cs.out);
    REQUIRE(ec.sections == ej.sections);
    REQUIRE(ec.warnings == ej.warnings);

    SECTION("--file writes the same report to disk") {
        std::string path = "cli_spectrum_test.json";
        auto fr = run_cli(base + " --out json --file " + path);
        REQUIRE(fr.code == 0);
        REQUIRE(fr.out.empty());
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        auto ef = from_json_text(ss.str());
        REQUIRE(ef.sections == ej.sections);
        std::remove(path.c_str());
    }
}

TEST_CASE("command line: transfer-series terms", "[cli]") {
    auto r = run_cli("beta --potential mathieu --n 10 --z 0,0 --radius-j 0 "
                     "--depth 12 --tol 0 --per-term");
    REQUIRE(r.code == 0);
    auto e = from_json_text(r.out);
    REQUIRE(e.sections.size() == 2);
    REQUIRE(e.sections[0].kind == "beta");
    REQUIRE(e.sections[1].kind == "beta-terms");
    const auto& terms = e.sections[1];
    REQUIRE(terms.rows.size() == 12);
    for (size_t k = 0; k < 8; ++k) {
        REQUIRE(std::abs(terms.rows[k][3].z) <= 1e-14); // s21
        REQUIRE(std::abs(terms.rows[k][2].z) <= 1e-14); // s12
    }
    REQUIRE(std::abs(terms.rows[8][3].z) > 0.0);
    REQUIRE(terms.rows[0][1].z.real() == Approx(1.0 / 198.0).epsilon(1e-12)); // s11
    const auto& head = e.sections[0].rows[0];
    REQUIRE(head[0].i == 10);
    REQUIRE(head[5].i > 20); // truncation radius resolved from the defaults
    REQUIRE(head[6].i == 12);
}

TEST_CASE("command line: solve with the matrix cross-check", "[cli]") {
    auto r = run_cli("solve --potential mathieu --n-min 2 --n-max 4 "
                     "--cross-validate --trunc 160");
    REQUIRE(r.code == 0);
    auto e = from_json_text(r.out);
    REQUIRE(e.warnings.empty());
    REQUIRE(e.sections.size() == 2);
    REQUIRE(e.sections[0].kind == "solve");
    REQUIRE(e.sections[0].rows.size() == 3);
    REQUIRE(e.sections[1].kind == "cross-validation");
    REQUIRE(meta_get(e.sections[1], "truncations") == "120,160");
    REQUIRE(meta_get(e.sections[1], "pass") == "true");
    REQUIRE(meta_get(e.sections[1], "stable") == "true");
    REQUIRE(std::stod(meta_get(e.sections[1], "max_delta")) < 1e-9);

    SECTION("cross-validation requires a truncation") {
        auto bad = run_cli("solve --potential mathieu --n-min 2 --n-max 4 --cross-validate",
                           true);
        REQUIRE(bad.code == 2);
        REQUIRE(bad.out.find("config error") != std::string::npos);
    }
}

TEST_CASE("command line: riesz verdicts and the assertion flag", "[cli]") {
    std::string e1 = "example1:omega=gevpow:c=1,gamma=0.5,a=1.1";
    auto r = run_cli("riesz --potential " + e1 +
                     " --parity even --criterion 1 --n-min 10 --n-max 40");
    REQUIRE(r.code == 0);
    auto e = from_json_text(r.out);
    const auto& t = e.sections[0];
    REQUIRE(t.kind == "riesz");
    REQUIRE(meta_get(t, "verdict") == "basis");
    REQUIRE(meta_get(t, "vote") == "basis");
    REQUIRE(meta_get(t, "trend") == "bounded");
    REQUIRE(std::stod(meta_get(t, "sup_estimate")) == Approx(1.0262169961901801).epsilon(1e-9));
    REQUIRE(t.columns.size() == 3); // n, t, comparability

    SECTION("a no-basis verdict flips the exit code only when asserted") {
        std::string args = "riesz --potential " + e1 +
                           " --parity odd --criterion makin --n-min 11 --n-max 41 --window 3";
        auto plain = run_cli(args);
        REQUIRE(plain.code == 0);
        auto ep = from_json_text(plain.out);
        REQUIRE(meta_get(ep.sections[0], "verdict") == "no_basis");

        auto asserted = run_cli(args + " --assert-basis");
        REQUIRE(asserted.code == 4);
        auto ea = from_json_text(asserted.out); // report still emitted
        REQUIRE(meta_get(ea.sections[0], "verdict") == "no_basis");
    }
}

TEST_CASE("command line: asymptotic law refusal", "[cli]") {
    auto r = run_cli("asym --potential sawtooth --law dev61.7 --n-min 10 --n-max 12");
    REQUIRE(r.code == 0);
    auto e = from_json_text(r.out);
    REQUIRE(e.warnings ==
            std::vector<std::string>{"law refused: ratio within 0.1 of -1 at n=10",
                                     "law refused: ratio within 0.1 of -1 at n=11",
                                     "law refused: ratio within 0.1 of -1 at n=12"});
    REQUIRE(e.sections.size() == 2);
    REQUIRE(meta_get(e.sections[0], "refused") == "true");
    for (const auto& row : e.sections[0].rows) REQUIRE(row[6].b); // all degenerate
    REQUIRE(e.sections[1].rows.empty());
}

TEST_CASE("command line: weight checks", "[cli]") {
    auto r = run_cli("weights --family gevrey:c=1,gamma=0.5 --check sub --kmax 512");
    REQUIRE(r.code == 0);
    auto e = from_json_text(r.out);
    REQUIRE(e.sections[0].kind == "weights-sub");
    REQUIRE(meta_get(e.sections[0], "kind") == "exact");
    REQUIRE(e.sections[0].rows[0][0].d == 1.0); // C

    auto s = run_cli("weights --family log --check slow --kmax 4096");
    REQUIRE(s.code == 0);
    auto es = from_json_text(s.out);
    REQUIRE(es.sections[0].kind == "weights-slow");
    REQUIRE(meta_get(es.sections[0], "diverging") == "false");
    REQUIRE(es.sections[0].rows[0][0].d == Approx(1.4093838908503586).epsilon(1e-12));
    REQUIRE(es.sections[0].rows[0][1].i == 2);

    auto bad = run_cli("weights --family log --check typo --kmax 64", true);
    REQUIRE(bad.code == 2);
    REQUIRE(bad.out.find("config error") != std::string::npos);
}

TEST_CASE("command line: reproduction presets", "[cli]") {
    auto r = run_cli("reproduce sawtooth --set ns=10,20");
    REQUIRE(r.code == 0);
    auto e = from_json_text(r.out);
    REQUIRE(e.warnings ==
            std::vector<std::string>{"dev61.7: law refused: ratio within 0.1 of -1 at n=10",
                                     "dev61.7: law refused: ratio within 0.1 of -1 at n=20"});
    REQUIRE(e.sections.size() >= 4);

    SECTION("grammar is fixed") {
        REQUIRE(run_cli("reproduce nosuch", true).code == 2);
        REQUIRE(run_cli("reproduce sawtooth --format json", true).code == 2);
        auto bad = run_cli("reproduce sawtooth --set zz=1", true);
        REQUIRE(bad.code == 2);
        REQUIRE(bad.out.find("has no parameter 'zz'") != std::string::npos);
    }
}

TEST_CASE("command line: exit codes", "[cli]") {
    auto cfg = run_cli("spectrum --potential nosuchpot --bc per+ --n-min 2 --n-max 4 "
                       "--trunc 60 --tol 1e-10 --out json",
                       true);
    REQUIRE(cfg.code == 2);
    REQUIRE(cfg.out.find("config error") != std::string::npos);

    auto esc = run_cli("solve --potential mathieu --n-min 1 --n-max 1", true);
    REQUIRE(esc.code == 3);
    REQUIRE(esc.out.find("computation error") != std::string::npos);
    REQUIRE(esc.out.find("escaped") != std::string::npos);
}
