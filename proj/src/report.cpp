#include "jetvar/report.hpp"

#include <chrono>
#include <sstream>

#include "jetvar/errors.hpp"
#include "jetvar/evaluate.hpp"
#include "jetvar/mechanics.hpp"
#include "jetvar/text.hpp"
#include "jetvar/variational.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

using nlohmann::json;

namespace {

constexpr int kDefaultPoints = 20;
constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr int kDefaultMaxGenerations = 6;

json nullable(int v) { return v < 0 ? json(nullptr) : json(v); }

json level_json(const std::optional<int>& level) { return level ? json(*level) : json("none"); }

json header(const std::string& command, const LagrangianSpec* spec, int points, std::uint64_t seed) {
    json out;
    out["schema"] = kReportSchema;
    out["tool"] = {{"name", "jetvar"}, {"version", kToolVersion}};
    out["command"] = command;
    out["points"] = points;
    out["seed"] = seed;
    if (spec) out["input"] = print_spec(*spec);
    return out;
}

json field_coefficients(const CartanCoefficients& c, std::uint64_t limit) {
    json out = json::array();
    for (std::size_t a = 0; a < c.L0.size(); ++a) {
        json L2 = json::array(), L1 = json::array();
        for (std::size_t i = 0; i < c.L1[a].size(); ++i) {
            json row = json::array();
            for (const Expr& e : c.L2[a][i]) row.push_back(expr_json(e, limit));
            L2.push_back(row);
            L1.push_back(expr_json(c.L1[a][i], limit));
        }
        out.push_back({{"fiber", a + 1}, {"L2", L2}, {"L1", L1}, {"L0", expr_json(c.L0[a], limit)}});
    }
    return out;
}

json mech_coefficients(const Momenta& p, std::uint64_t limit) {
    json out = json::array();
    for (std::size_t a = 0; a < p.L.size(); ++a) {
        json row;
        row["fiber"] = a + 1;
        for (std::size_t r = 0; r < p.L[a].size(); ++r) row["L" + std::to_string(r)] = expr_json(p.L[a][r], limit);
        out.push_back(row);
    }
    return out;
}

json identity_json(const IdentityResult& r) {
    return {{"identity", r.identity}, {"passed", r.passed}, {"method", r.method}, {"checks", r.checks},
            {"points", r.points},     {"seed", r.seed},     {"max_error", r.max_error}, {"detail", r.detail}};
}

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

ReportDocument analyze(const LagrangianSpec& spec, const RunOptions& o, int points, std::uint64_t seed) {
    ReportDocument doc;
    json& out = doc.body;
    out = header("analyze", &spec, points, seed);
    if (spec.kind == LagrangianKind::Mechanics) {
        MechLagrangian lag = mech_lagrangian(spec);
        Momenta p = momenta(lag);
        MechProjectability level = projectability_level_mech(lag, p);
        out["projectability"] = {{"level", level_json(level.level)}, {"lower_order", level.lower_order}};
        out["coefficients"] = mech_coefficients(p, o.print_limit);
        return doc;
    }
    FieldLagrangian lag = spec.kind == LagrangianKind::Hilbert
                              ? MetricContext(spec.base_dim).hilbert_lagrangian(effective_policy(spec))
                              : field_lagrangian(spec);
    CartanCoefficients c = cartan_coefficients(lag);
    out["projectability"] = {{"level", level_json(projectability_level(lag, c))}};
    out["coefficients"] = field_coefficients(c, o.print_limit);
    return doc;
}

ReportDocument constraints(const LagrangianSpec& spec, const RunOptions& o, int points, std::uint64_t seed) {
    ReportDocument doc;
    json& out = doc.body;
    out = header("constraints", &spec, points, seed);
    int max_generations = o.max_generations.value_or(spec.options.max_generations.value_or(kDefaultMaxGenerations));
    out["max_generations"] = max_generations;
    if (spec.kind == LagrangianKind::Mechanics) {
        MechLagrangian lag = mech_lagrangian(spec);
        Momenta p = momenta(lag);
        MechProjectability level = projectability_level_mech(lag, p);
        ConstraintChain chain = constraint_chain_mech(lag, max_generations);
        out["projectability"] = {{"level", level_json(level.level)}, {"lower_order", level.lower_order}};
        out["chain"] = chain_json(chain, o.print_limit);
        return doc;
    }
    FieldLagrangian lag = spec.kind == LagrangianKind::Hilbert
                              ? MetricContext(spec.base_dim).hilbert_lagrangian(effective_policy(spec))
                              : field_lagrangian(spec);
    CartanCoefficients c = cartan_coefficients(lag);
    out["projectability"] = {{"level", level_json(projectability_level(lag, c))}};
    out["chain"] = chain_json(constraint_algorithm(lag, c, max_generations), o.print_limit);
    return doc;
}

ReportDocument gravity(const LagrangianSpec& spec, const RunOptions& o, int points, std::uint64_t seed) {
    int d = o.dim ? *o.dim : (spec.kind == LagrangianKind::Hilbert ? spec.base_dim : 4);
    if (d < 2 || d > 4) throw std::invalid_argument("gravity-verify supports d = 2, 3, 4");
    ReportDocument doc;
    json& out = doc.body;
    out = header("gravity-verify", nullptr, points, seed);
    out["dimension"] = d;
    MetricContext ctx(d);
    VerifyOptions vo;
    vo.points = points;
    vo.seed = seed;
    vo.max_generations = o.max_generations.value_or(spec.options.max_generations.value_or(kDefaultMaxGenerations));
    HilbertPipeline pipeline;
    GravityReport report = gravity_verify(ctx, vo, &pipeline);
    json results = json::array();
    for (const IdentityResult& r : report.results) results.push_back(identity_json(r));
    out["results"] = results;
    out["passed"] = report.passed();
    out["projectability"] = {{"level", level_json(projectability_level(pipeline.lagrangian, pipeline.coefficients))}};
    out["chain"] = chain_json(pipeline.chain, o.print_limit);
    doc.exit_code = report.passed() ? 0 : 2;
    return doc;
}

bool is_decimal(const std::string& s) { return s.find_first_of(".eE") != std::string::npos; }

/// Library value of a metric quantity, or nullopt for an unknown id.
std::optional<Expr> metric_quantity(const MetricContext& ctx, const std::string& id, const std::vector<int>& ix) {
    auto need = [&](std::size_t n) {
        if (ix.size() != n) throw std::invalid_argument(id + " needs " + std::to_string(n) + " indices");
        for (int i : ix)
            if (i < 0 || i >= ctx.dim()) throw std::invalid_argument(id + " index out of range");
    };
    if (id == "christoffel") {
        need(3);
        return ctx.christoffel(ix[0], ix[1], ix[2]);
    }
    if (id == "ricci") {
        need(2);
        return ctx.ricci(ix[0], ix[1]);
    }
    if (id == "scalar-curvature") {
        need(0);
        return ctx.scalar_curvature();
    }
    if (id == "einstein-tensor") {
        need(2);
        return ctx.raised_ricci(ix[0], ix[1]) - Expr(Rational(1, 2)) * ctx.inverse(ix[0], ix[1]) * ctx.scalar_curvature();
    }
    if (id == "hilbert-L") {
        need(0);
        return ctx.hilbert_expr();
    }
    return std::nullopt;
}

Expr parse_mech(const std::string& text, int n, int k) {
    LagrangianSpec spec;
    spec.kind = LagrangianKind::Mechanics;
    spec.fiber_dim = n;
    spec.order = k;
    std::ostringstream src;
    src << "lagrangian { kind: mechanics, n: " << n << ", k: " << k << " }\nL = " << text;
    return parse_spec(src.str()).lagrangian;
}

bool same_expr(const Expr& a, const std::string& text) { return is_zero(a - parse_expr(text)); }

json check_record(const json& rec, double tolerance) {
    json out;
    const std::string id = rec.at("quantity").get<std::string>();
    out["quantity"] = id;
    if (id == "mech-momenta" || id == "mech-chain") {
        const int n = rec.value("fiber_dim", 1), k = rec.at("order").get<int>();
        const std::string L = rec.at("lagrangian").get<std::string>();
        out["lagrangian"] = L;
        MechLagrangian lag = make_mech_lagrangian(n, k, parse_mech(L, n, k));
        bool ok = true;
        std::string detail;
        if (id == "mech-momenta") {
            Momenta p = momenta(lag);
            for (const auto& [key, value] : rec.at("value").items()) {
                int r = std::stoi(key.substr(1));
                if (r < 0 || r > k) throw std::invalid_argument("momentum index out of range: " + key);
                if (!same_expr(p.L[0][static_cast<std::size_t>(r)], value.get<std::string>())) {
                    ok = false;
                    detail = key + " = " + to_string(p.L[0][static_cast<std::size_t>(r)]) + ", fixture " + value.get<std::string>();
                }
            }
        } else {
            ConstraintChain chain = constraint_chain_mech(lag);
            const json& gens = rec.at("value");
            if (gens.size() != chain.generations.size()) {
                ok = false;
                detail = std::to_string(chain.generations.size()) + " generations, fixture " + std::to_string(gens.size());
            } else {
                for (std::size_t g = 0; g < gens.size() && ok; ++g) {
                    if (gens[g].size() != chain.generations[g].size()) {
                        ok = false;
                        detail = "generation " + std::to_string(g + 1) + " size differs";
                        break;
                    }
                    for (std::size_t j = 0; j < gens[g].size(); ++j)
                        if (!same_expr(chain.generations[g][j].expr, gens[g][j].get<std::string>())) {
                            ok = false;
                            detail = "generation " + std::to_string(g + 1) + " constraint " + std::to_string(j + 1);
                        }
                }
            }
        }
        out["passed"] = ok;
        out["method"] = "symbolic";
        if (!ok) out["detail"] = detail;
        return out;
    }

    const int d = rec.at("dimension").get<int>();
    if (d < 2 || d > 4) throw std::invalid_argument("fixture dimension must be 2, 3 or 4");
    std::vector<int> ix = rec.value("indices", std::vector<int>{});
    MetricContext ctx(d);
    std::optional<Expr> e = metric_quantity(ctx, id, ix);
    if (!e) throw std::invalid_argument("unknown fixture quantity '" + id + "'");
    Point point;
    for (const auto& [name, value] : rec.at("point").items()) point.emplace(symbol_from_name(name), Rational(value.get<std::string>()));
    for (auto& [s, q] : point) q.canonicalize();
    out["dimension"] = d;
    out["indices"] = ix;
    NumericValue v = ExactEvaluator(point)(*e);
    const std::string want = rec.at("value").get<std::string>();
    if (is_decimal(want)) {
        BigFloat w(want);
        BigFloat scale = std::max(abs(w), abs(v.approx));
        double err = scale > BigFloat("1e-30") ? static_cast<double>(abs(v.approx - w) / scale) : 0.0;
        out["method"] = "decimal";
        out["error"] = err;
        out["passed"] = err <= tolerance;
    } else {
        Rational w(want);
        w.canonicalize();
        out["method"] = "exact";
        out["passed"] = v.exact && v.rational == w;
        if (!v.exact || v.rational != w) out["detail"] = "library value " + v.to_string();
    }
    return out;
}

}  // namespace

json expr_json(const Expr& e, std::uint64_t limit) {
    if (tree_size(e) <= limit) return to_string(e);
    return {{"dag_size", dag_size(e)}, {"tree_size", tree_size(e)}};
}

json chain_json(const ConstraintChain& chain, std::uint64_t limit) {
    json out;
    out["status"] = to_string(chain.status);
    json compact = json::array(), provenance = json::array();
    for (const auto& gen : chain.generations) {
        json row = json::array();
        for (const Constraint& c : gen) {
            json e = expr_json(c.expr, limit);
            row.push_back(e);
            provenance.push_back({{"expr", e},
                                  {"generation", c.generation},
                                  {"parent", nullable(c.parent)},
                                  {"derivation", c.derivation()},
                                  {"fiber", c.fiber + 1},
                                  {"identically_zero", c.identically_zero}});
        }
        compact.push_back(row);
    }
    out["chain"] = compact;
    out["constraints"] = provenance;
    json residuals = json::array();
    for (const ResidualEquation& r : chain.residual_equations)
        residuals.push_back({{"expr", expr_json(r.expr, limit)},
                             {"source_generation", r.source_generation},
                             {"parent", nullable(r.parent)},
                             {"direction", r.direction < 0 ? json(nullptr) : json(r.direction + 1)},
                             {"fiber", r.fiber + 1}});
    out["residual_equations"] = residuals;
    out["determines_unknowns"] = chain.determines_unknowns;
    json solved = json::object();
    for (const auto& [s, v] : chain.solved_unknowns) solved[symbol_name(s)] = expr_json(v, limit);
    out["solved_unknowns"] = solved;
    out["effective_generations"] = chain.effective_generations();
    if (chain.nominal_generations) {
        out["nominal_generations"] = *chain.nominal_generations;
        out["nominal_count_matches"] = *chain.nominal_generations == chain.effective_generations();
    }
    return out;
}

ReportDocument run(const std::string& command, const LagrangianSpec& spec, const RunOptions& options) {
    Clock clock;
    const int points = options.points.value_or(spec.options.points.value_or(kDefaultPoints));
    const std::uint64_t seed = options.seed.value_or(spec.options.seed.value_or(kDefaultSeed));
    ReportDocument doc;
    if (command == "analyze") {
        doc = analyze(spec, options, points, seed);
    } else if (command == "constraints") {
        doc = constraints(spec, options, points, seed);
    } else if (command == "gravity-verify") {
        doc = gravity(spec, options, points, seed);
    } else if (command == "fixtures-check") {
        throw std::invalid_argument("fixtures-check reads a fixture file, not a Lagrangian");
    } else {
        throw std::invalid_argument("unknown command '" + command + "'");
    }
    if (options.timing) doc.body["timing"] = {{"seconds", clock.seconds()}};
    return doc;
}

ReportDocument fixtures_check(const json& fixtures, const RunOptions& options) {
    Clock clock;
    if (fixtures.value("schema", std::string()) != kFixtureSchema)
        throw std::invalid_argument("fixture file schema must be " + std::string(kFixtureSchema));
    ReportDocument doc;
    json& out = doc.body;
    out = header("fixtures-check", nullptr, 0, fixtures.value("seed", std::uint64_t{0}));
    out.erase("points");
    out["generator"] = fixtures.value("generator", std::string());
    json results = json::array();
    bool all = true;
    for (const json& rec : fixtures.at("records")) {
        json r = check_record(rec, 1e-9);
        all = all && r.at("passed").get<bool>();
        results.push_back(r);
    }
    out["records"] = results;
    out["passed"] = all;
    doc.exit_code = all ? 0 : 2;
    if (options.timing) out["timing"] = {{"seconds", clock.seconds()}};
    return doc;
}

namespace {

void render(const json& j, int indent, std::ostringstream& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (v.is_structured() && !v.empty()) {
                out << pad << k << ":\n";
                render(v, indent + 1, out);
            } else {
                out << pad << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (v.is_structured() && !v.empty()) {
                out << pad << "-\n";
                render(v, indent + 1, out);
            } else {
                out << pad << "- " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
            }
        }
    } else {
        out << pad << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

}  // namespace

std::string render_text(const json& report) {
    std::ostringstream out;
    render(report, 0, out);
    return out.str();
}

}  // namespace jetvar
