#include "ggm/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <limits>
#include <set>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "ggm/error.hpp"
#include "ggm/gmduality.hpp"
#include "ggm/projgeom.hpp"

namespace ggm {

using nlohmann::json;
namespace fs = std::filesystem;

ExitStatus SessionResult::status() const
{
    if (!error.empty())
        return ExitStatus::Error;
    bool partial = false;
    for (const auto& c : commands) {
        if (!c.ok)
            return ExitStatus::Error;
        partial = partial || c.partial;
    }
    return partial ? ExitStatus::Partial : ExitStatus::Success;
}

namespace {

const std::map<std::string, std::string> kAliases{
    {"cohomology", "sheaf_cohomology_table"}, {"local-cohomology", "local_cohomology_table"},
    {"saturate", "saturate"},                 {"torsion", "torsion_test"},
    {"cartier", "cartier_certificate"},       {"gm-check", "ggm_duality_check"},
    {"completion", "graded_completion"},      {"veronese", "veronese"},
};

// Accepted arguments per op, besides "op" and "output".
const std::map<std::string, std::set<std::string>> kOps{
    {"sheaf_cohomology_table", {"module", "window"}},
    {"cech_table", {"module", "gens", "window"}},
    {"local_cohomology_table", {"module", "gens", "window", "backend"}},
    {"saturate", {"module", "gens", "window"}},
    {"torsion_test", {"module", "element", "window"}},
    {"cartier_certificate", {"d", "search_bound"}},
    {"triangle_check", {"module", "gens", "window"}},
    {"vanishing_bounds", {"module", "window"}},
    {"serre_roundtrip_check", {"module", "window", "search_bound"}},
    {"quotient_iso_check", {"source", "target", "images", "window"}},
    {"ggm_duality_check", {"window"}},
    {"graded_completion", {"module", "gens", "window", "n_max"}},
    {"derived_complete_check", {"module", "gens", "window", "depth"}},
    {"gamma_vanishing_on_localization", {"f", "gens", "window"}},
    {"tower_limits", {"module", "f", "weight", "depth"}},
    {"veronese", {"module", "m", "window"}},
};

std::size_t line_of_offset(const std::string& text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

class Validator {
public:
    explicit Validator(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& why) const
    {
        std::size_t line = 0;
        const auto slash = path.rfind('/');
        const std::string key = slash == std::string::npos ? path : path.substr(slash + 1);
        if (!text_.empty() && !key.empty()) {
            const auto pos = text_.find("\"" + key + "\"");
            if (pos != std::string::npos)
                line = line_of_offset(text_, pos);
        }
        const std::string where = line ? fmt::format("line {}, field {}", line, path) : "field " + path;
        throw ParseError(where + ": " + why, line);
    }

    void keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const
    {
        if (!obj.is_object())
            fail(path, "expected an object");
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k))
                fail(path + "/" + k, "unknown key");
    }

    void string_list(const json& v, const std::string& path) const
    {
        if (!v.is_array())
            fail(path, "expected a list of strings");
        for (std::size_t k = 0; k < v.size(); ++k)
            if (!v[k].is_string())
                fail(fmt::format("{}/{}", path, k), "expected a string");
    }

    void int_list(const json& v, const std::string& path) const
    {
        if (!v.is_array())
            fail(path, "expected a list of integers");
        for (std::size_t k = 0; k < v.size(); ++k)
            if (!v[k].is_number_integer())
                fail(fmt::format("{}/{}", path, k), "expected an integer");
    }

    void integer(const json& v, const std::string& path, long lo) const
    {
        if (!v.is_number_integer() || v.get<long>() < lo)
            fail(path, fmt::format("expected an integer >= {}", lo));
    }

    void window(const json& v, const std::string& path) const
    {
        int_list(v, path);
        if (v.size() != 2 || v[0].get<long>() > v[1].get<long>())
            fail(path, "expected [a, b] with a <= b");
    }

    void matrix(const json& v, const std::string& path, std::size_t width) const
    {
        if (!v.is_array())
            fail(path, "expected a list of columns");
        for (std::size_t c = 0; c < v.size(); ++c) {
            const std::string p = fmt::format("{}/{}", path, c);
            string_list(v[c], p);
            if (v[c].size() != width)
                fail(p, fmt::format("column has {} entries, expected {}", v[c].size(), width));
        }
    }

private:
    const std::string& text_;
};

void validate(const json& s, const std::string& text)
{
    Validator v(text);
    v.keys(s, "", {"description", "field", "ring", "modules", "params", "commands"});
    if (s.contains("field")) {
        if (!s["field"].is_string())
            v.fail("/field", "expected \"Q\" or \"Fp:<p>\"");
        try {
            Field::parse(s["field"].get<std::string>());
        } catch (const Error& e) {
            v.fail("/field", e.what());
        }
    }
    if (!s.contains("ring"))
        v.fail("/ring", "missing");
    const json& ring = s["ring"];
    v.keys(ring, "/ring", {"vars", "weights", "relations", "bound"});
    if (!ring.contains("vars") || !ring.contains("weights"))
        v.fail("/ring", "vars and weights are required");
    v.string_list(ring["vars"], "/ring/vars");
    v.int_list(ring["weights"], "/ring/weights");
    if (ring["weights"].size() != ring["vars"].size())
        v.fail("/ring/weights", fmt::format("{} weights for {} variables", ring["weights"].size(), ring["vars"].size()));
    if (ring.contains("relations"))
        v.string_list(ring["relations"], "/ring/relations");
    if (ring.contains("bound"))
        v.integer(ring["bound"], "/ring/bound", 1);

    std::set<std::string> modules{"A"};
    if (s.contains("modules")) {
        if (!s["modules"].is_object())
            v.fail("/modules", "expected an object of named modules");
        for (const auto& [name, m] : s["modules"].items()) {
            const std::string p = "/modules/" + name;
            v.keys(m, p, {"twists", "relations"});
            if (!m.contains("twists"))
                v.fail(p + "/twists", "missing");
            v.int_list(m["twists"], p + "/twists");
            if (m["twists"].empty())
                v.fail(p + "/twists", "a module needs at least one generator");
            if (m.contains("relations"))
                v.matrix(m["relations"], p + "/relations", m["twists"].size());
            modules.insert(name);
        }
    }
    if (s.contains("params")) {
        const json& p = s["params"];
        v.keys(p, "/params", {"window", "budget", "span", "trunc"});
        if (p.contains("window"))
            v.window(p["window"], "/params/window");
        for (const char* k : {"budget", "span", "trunc"})
            if (p.contains(k))
                v.integer(p[k], std::string("/params/") + k, 1);
    }
    if (!s.contains("commands") || !s["commands"].is_array())
        v.fail("/commands", "expected a list of commands");
    for (std::size_t c = 0; c < s["commands"].size(); ++c) {
        const json& cmd = s["commands"][c];
        const std::string p = fmt::format("/commands/{}", c);
        if (!cmd.is_object() || !cmd.contains("op") || !cmd["op"].is_string())
            v.fail(p + "/op", "every command needs an op");
        const std::string op = canonical_op(cmd["op"].get<std::string>());
        if (op.empty())
            v.fail(p + "/op", fmt::format("unknown op '{}'", cmd["op"].get<std::string>()));
        auto allowed = kOps.at(op);
        allowed.insert("op");
        allowed.insert("output");
        v.keys(cmd, p, allowed);
        if (!cmd.contains("output") || !cmd["output"].is_string() || cmd["output"].get<std::string>().empty())
            v.fail(p + "/output", "missing output path");
        for (const char* k : {"module", "source", "target"})
            if (cmd.contains(k)) {
                if (!cmd[k].is_string() || !modules.count(cmd[k].get<std::string>()))
                    v.fail(p + "/" + k, "not a declared module");
            }
        if (cmd.contains("window"))
            v.window(cmd["window"], p + "/window");
        if (cmd.contains("gens"))
            v.string_list(cmd["gens"], p + "/gens");
        if (cmd.contains("element"))
            v.string_list(cmd["element"], p + "/element");
        if (cmd.contains("f") && !cmd["f"].is_string())
            v.fail(p + "/f", "expected a polynomial string");
        if (cmd.contains("backend") && cmd["backend"] != "koszul-colimit" && cmd["backend"] != "cech-truncated")
            v.fail(p + "/backend", "expected \"koszul-colimit\" or \"cech-truncated\"");
        for (const char* k : {"d", "m", "search_bound", "n_max", "depth"})
            if (cmd.contains(k))
                v.integer(cmd[k], p + "/" + k, 1);
        if (cmd.contains("weight"))
            v.integer(cmd["weight"], p + "/weight", std::numeric_limits<int>::min());
        if (cmd.contains("images") && !cmd["images"].is_array())
            v.fail(p + "/images", "expected a list of columns");
        const auto need = [&](const char* k) {
            if (!cmd.contains(k))
                v.fail(p + "/" + k, fmt::format("required by {}", op));
        };
        if (op == "cartier_certificate")
            need("d");
        if (op == "veronese")
            need("m");
        if (op == "gamma_vanishing_on_localization" || op == "tower_limits")
            need("f");
        if (op == "tower_limits")
            need("weight");
        if (op == "quotient_iso_check") {
            need("source");
            need("target");
            need("images");
        }
    }
}

// ---------------------------------------------------------------- execution

struct Grid {
    std::string corner;
    std::vector<int> weights;
    std::vector<std::pair<std::string, std::vector<std::optional<std::string>>>> rows;
};

struct Outcome {
    json doc;
    std::optional<Grid> grid;
    bool partial = false;
    std::string stats;
};

json opt_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> opt_cell(const std::optional<std::size_t>& v)
{
    return v ? std::optional<std::string>(std::to_string(*v)) : std::nullopt;
}

class Context {
public:
    Context(const json& session, const Overrides& ov) : session_(session), ov_(ov)
    {
        field_ = ov.field ? *ov.field : Field::parse(session.value("field", std::string("Q")));
        const json& r = session["ring"];
        ring_ = WeightedRing::build(r["vars"].get<std::vector<std::string>>(), r["weights"].get<std::vector<int>>(),
                                    r.value("relations", std::vector<std::string>{}), field_,
                                    r.value("bound", WeightedRing::kDefaultBound));
        const json params = session.value("params", json::object());
        opt_.budget = params.value("budget", opt_.budget);
        opt_.span = params.value("span", opt_.span);
        opt_.trunc = params.value("trunc", opt_.trunc);
        opt_.jobs = std::max(1, ov.jobs);
        topt_ = TorsionOptions{opt_.budget, opt_.span};
        if (params.contains("window"))
            window_ = {params["window"][0].get<int>(), params["window"][1].get<int>()};
    }

    Outcome run(const std::string& op, const json& cmd);

    const Field& field() const { return field_; }
    const RingPtr& ring() const { return ring_; }
    const EngineOptions& options() const { return opt_; }

private:
    ModulePtr module(const json& cmd, const char* key = "module")
    {
        const std::string name = cmd.value(key, std::string("A"));
        if (auto it = modules_.find(name); it != modules_.end())
            return it->second;
        ModulePtr m;
        const json mods = session_.value("modules", json::object());
        if (mods.contains(name)) {
            const json& decl = mods[name];
            m = GradedModule::parse(ring_, decl["twists"].get<std::vector<int>>(),
                                    decl.value("relations", std::vector<std::vector<std::string>>{}), name);
        } else {
            m = GradedModule::free(ring_);
        }
        modules_[name] = m;
        return m;
    }

    std::vector<Poly> gens(const json& cmd) const
    {
        if (!cmd.contains("gens"))
            return ring_->positive_generators().gens;
        std::vector<Poly> out;
        for (const auto& g : cmd["gens"])
            out.push_back(ring_->parse(g.get<std::string>()));
        return out;
    }

    std::pair<int, int> window(const json& cmd) const
    {
        if (ov_.window)
            return *ov_.window;
        if (cmd.contains("window"))
            return {cmd["window"][0].get<int>(), cmd["window"][1].get<int>()};
        if (window_)
            return *window_;
        throw ArgumentError("no window given for this command");
    }

    Outcome table(const CohomologyTable& t);
    Outcome torsion(const json& cmd);
    Outcome veronese(const json& cmd);

    const json& session_;
    const Overrides& ov_;
    Field field_;
    RingPtr ring_;
    EngineOptions opt_;
    TorsionOptions topt_;
    std::optional<std::pair<int, int>> window_;
    std::map<std::string, ModulePtr> modules_;
};

Outcome Context::table(const CohomologyTable& t)
{
    Outcome out;
    Grid g{"j", {}, {}};
    for (int i = t.i_min; i <= t.i_max; ++i)
        g.weights.push_back(i);
    json cells = json::array();
    int max_stage = 0;
    for (int j = t.j_min; j <= t.j_max; ++j) {
        std::vector<std::optional<std::string>> row;
        for (int i = t.i_min; i <= t.i_max; ++i) {
            const Cell& c = t.at(j, i);
            row.push_back(opt_cell(c.dim));
            max_stage = std::max(max_stage, c.stage);
            json cell{{"j", j}, {"i", i}, {"dim", opt_json(c.dim)}, {"stage", c.stage},
                      {"status", c.dim ? "ok" : "Inconclusive"}};
            if (!c.note.empty())
                cell["note"] = c.note;
            cells.push_back(std::move(cell));
        }
        g.rows.emplace_back(std::to_string(j), std::move(row));
    }
    out.doc = {{"backend", t.backend}, {"complex", t.complex}, {"window", {t.i_min, t.i_max}},
               {"degrees", {t.j_min, t.j_max}}, {"cells", std::move(cells)}, {"inconclusive", t.inconclusive()}};
    out.grid = std::move(g);
    out.partial = !t.complete();
    out.stats = fmt::format("cells={} inconclusive={} max_stage={}", t.cells.size(), t.inconclusive(), max_stage);
    return out;
}

json verdict_json(const TorsionVerdict& v)
{
    json out{{"verdict", to_string(v.verdict)}, {"steps", v.steps}};
    if (!v.witness.empty())
        out["witness"] = v.witness;
    if (!v.note.empty())
        out["note"] = v.note;
    return out;
}

Outcome Context::torsion(const json& cmd)
{
    auto m = module(cmd);
    auto pg = ring_->positive_generators();
    Outcome out;
    if (cmd.contains("element")) {
        GradedModule::Column x;
        for (const auto& e : cmd["element"])
            x.push_back(ring_->parse(e.get<std::string>()));
        const int w = m->element_weight(x);
        const SparseVec v = m->coords(x, w);
        const int dmax = *std::max_element(pg.degrees.begin(), pg.degrees.end());
        const auto kernel = torsion_test(*m, w, v, pg, topt_);
        const auto powers = torsion_test_powers(*m, w, v, pg.d, topt_);
        const auto tail = torsion_test_tail(*m, w, v, dmax, topt_);
        out.doc = {{"element", cmd["element"]},
                   {"weight", w},
                   {"kernel_chain", verdict_json(kernel)},
                   {"powers_of_A_d", verdict_json(powers)},
                   {"tail_vanishing", verdict_json(tail)},
                   {"verdict", to_string(kernel.verdict)},
                   {"conditions_agree", powers.verdict == tail.verdict}};
        out.partial = kernel.verdict == Verdict::Inconclusive;
        out.stats = fmt::format("weight={} steps={}", w, kernel.steps);
        return out;
    }
    const auto [lo, hi] = window(cmd);
    Grid g{"weight", {}, {{"torsion", {}}}};
    json rows = json::array();
    std::size_t undecided = 0;
    for (int i = lo; i <= hi; ++i) {
        TorsionVerdict t;
        try {
            t = torsion_test_piece(*m, i, pg, topt_);
        } catch (const WindowError& e) {
            t.note = e.what();
        }
        g.weights.push_back(i);
        g.rows[0].second.push_back(t.verdict == Verdict::Inconclusive
                                       ? std::nullopt
                                       : std::optional<std::string>(t.verdict == Verdict::Torsion ? "1" : "0"));
        undecided += t.verdict == Verdict::Inconclusive;
        json row = verdict_json(t);
        row["weight"] = i;
        row["dim"] = m->dim(i);
        rows.push_back(std::move(row));
    }
    out.doc = {{"window", {lo, hi}}, {"rows", std::move(rows)}};
    out.grid = std::move(g);
    out.partial = undecided > 0;
    out.stats = fmt::format("weights={} inconclusive={}", hi - lo + 1, undecided);
    return out;
}

Outcome Context::veronese(const json& cmd)
{
    auto m = module(cmd);
    const int mult = cmd["m"].get<int>();
    const auto [lo, hi] = window(cmd);
    VeroneseView view(ring_, mult);
    auto t = sheaf_cohomology_table(m, mult * lo, mult * hi, opt_);
    Outcome out;
    Grid g{"j", {}, {{"dim", {}}}};
    json rows = json::array();
    std::size_t undecided = 0;
    for (int j = t.j_min; j <= t.j_max; ++j)
        g.rows.emplace_back(std::to_string(j), std::vector<std::optional<std::string>>{});
    for (int i = lo; i <= hi; ++i) {
        g.weights.push_back(i);
        const std::size_t d = m->dim(mult * i);
        g.rows[0].second.push_back(std::to_string(d));
        json row{{"weight", i}, {"base_weight", mult * i}, {"dim", d}, {"ring_dim", view.dim(i)}};
        json h = json::array();
        for (int j = t.j_min; j <= t.j_max; ++j) {
            const auto v = t.dim(j, mult * i);
            undecided += !v;
            g.rows[static_cast<std::size_t>(j - t.j_min + 1)].second.push_back(opt_cell(v));
            h.push_back(opt_json(v));
        }
        row["sheaf_cohomology"] = std::move(h);
        rows.push_back(std::move(row));
    }
    out.doc = {{"m", mult}, {"window", {lo, hi}}, {"degrees", {t.j_min, t.j_max}}, {"rows", std::move(rows)}};
    out.grid = std::move(g);
    out.partial = undecided > 0;
    out.stats = fmt::format("weights={} inconclusive={}", hi - lo + 1, undecided);
    return out;
}

Outcome Context::run(const std::string& op, const json& cmd)
{
    if (op == "sheaf_cohomology_table") {
        const auto [lo, hi] = window(cmd);
        return table(sheaf_cohomology_table(module(cmd), lo, hi, opt_));
    }
    if (op == "cech_table") {
        const auto [lo, hi] = window(cmd);
        return table(cech_table(module(cmd), gens(cmd), lo, hi, opt_).table);
    }
    if (op == "local_cohomology_table") {
        const auto [lo, hi] = window(cmd);
        if (cmd.value("backend", std::string("koszul-colimit")) == "cech-truncated")
            return table(cech_truncated_table(module(cmd), gens(cmd), lo, hi, true, opt_));
        return table(local_cohomology_table(module(cmd), gens(cmd), lo, hi, opt_));
    }
    if (op == "torsion_test")
        return torsion(cmd);
    if (op == "veronese")
        return veronese(cmd);

    Outcome out;
    if (op == "saturate") {
        const auto [lo, hi] = window(cmd);
        auto rep = saturate(module(cmd), gens(cmd), lo, hi, opt_);
        Grid g{"weight", {}, {{"M", {}}, {"N'", {}}, {"ker", {}}, {"coker", {}}}};
        json rows = json::array();
        for (const auto& r : rep.rows) {
            g.weights.push_back(r.weight);
            g.rows[0].second.push_back(std::to_string(r.module_dim));
            g.rows[1].second.push_back(opt_cell(r.sat_dim));
            const bool known = r.sat_dim.has_value();
            g.rows[2].second.push_back(known ? opt_cell(r.kernel_dim) : std::nullopt);
            g.rows[3].second.push_back(known ? opt_cell(r.cokernel_dim) : std::nullopt);
            json row{{"weight", r.weight}, {"module_dim", r.module_dim}, {"sat_dim", opt_json(r.sat_dim)},
                     {"agrees_with_cech", r.agrees_with_cech}};
            if (known) {
                row["kernel_dim"] = r.kernel_dim;
                row["cokernel_dim"] = r.cokernel_dim;
                row["unit_rank"] = rank(r.unit);
            }
            if (!r.note.empty())
                row["note"] = r.note;
            rows.push_back(std::move(row));
        }
        out.doc = {{"window", {lo, hi}}, {"rows", std::move(rows)}};
        out.grid = std::move(g);
        out.partial = !rep.complete();
        out.stats = fmt::format("weights={} complete={}", rep.rows.size(), rep.complete());
    } else if (op == "cartier_certificate") {
        auto c = cartier_certificate(ring_, cmd["d"].get<int>(), cmd.value("search_bound", 4), opt_);
        json patches = json::array();
        for (const auto& p : c.patches) {
            json pj{{"patch", p.patch}, {"found", p.found}, {"bound", p.bound}};
            if (p.found) {
                pj["unit"] = {{"numerator", p.numerator}, {"k", p.k}};
                pj["inverse"] = {{"numerator", p.inverse}, {"k", p.k_inverse}};
            }
            patches.push_back(std::move(pj));
        }
        out.doc = {{"d", c.d}, {"bound", c.bound}, {"verdict", c.verdict()}, {"patches", std::move(patches)}};
        out.stats = c.verdict();
    } else if (op == "triangle_check") {
        const auto [lo, hi] = window(cmd);
        auto rep = triangle_check(module(cmd), gens(cmd), lo, hi, opt_);
        json rows = json::array();
        std::size_t undecided = 0;
        for (const auto& r : rep.rows) {
            rows.push_back({{"weight", r.weight},
                            {"status", r.inconclusive ? "Inconclusive" : (r.pass ? "pass" : "fail")},
                            {"detail", r.detail}});
            undecided += r.inconclusive;
        }
        out.doc = {{"window", {lo, hi}}, {"pass", rep.pass()}, {"first_failure", opt_json(rep.first_failure())},
                   {"rows", std::move(rows)}};
        out.partial = undecided > 0;
        out.stats = fmt::format("pass={} inconclusive={}", rep.pass(), undecided);
    } else if (op == "vanishing_bounds") {
        const auto [lo, hi] = window(cmd);
        auto b = vanishing_bounds(module(cmd), lo, hi, opt_);
        const auto bound = [](const std::optional<int>& c, const std::string& note) {
            json j{{"value", c ? json(*c) : json("NotFoundInWindow")}};
            if (!note.empty())
                j["note"] = note;
            return j;
        };
        out.doc = {{"window", {lo, hi}}, {"c_plus", bound(b.c_plus, b.note_plus)},
                   {"c_minus", bound(b.c_minus, b.note_minus)}};
        out.stats = fmt::format("c+={} c-={}", b.c_plus ? std::to_string(*b.c_plus) : "none",
                                b.c_minus ? std::to_string(*b.c_minus) : "none");
    } else if (op == "serre_roundtrip_check") {
        const auto [lo, hi] = window(cmd);
        auto rep = serre_roundtrip_check(module(cmd), lo, hi, opt_, cmd.value("search_bound", 4));
        json rows = json::array();
        std::size_t undecided = 0;
        for (const auto& r : rep.rows) {
            json row{{"weight", r.weight}, {"idempotent", r.idempotent}, {"kernel", to_string(r.kernel)},
                     {"cokernel", to_string(r.cokernel)}, {"sat_dim", r.sat_dim},
                     {"status", r.pass() ? "pass" : "fail"}};
            if (r.cartier)
                row["cartier_identity"] = *r.cartier;
            if (!r.note.empty())
                row["note"] = r.note;
            undecided += r.kernel == Verdict::Inconclusive || r.cokernel == Verdict::Inconclusive;
            rows.push_back(std::move(row));
        }
        out.doc = {{"d", rep.d}, {"window", {lo, hi}}, {"pass", rep.pass()}, {"rows", std::move(rows)}};
        if (!rep.note.empty())
            out.doc["note"] = rep.note;
        out.partial = undecided > 0;
        out.stats = fmt::format("d={} pass={}", rep.d, rep.pass());
    } else if (op == "quotient_iso_check") {
        const auto [lo, hi] = window(cmd);
        std::vector<GradedModule::Column> images;
        for (const auto& col : cmd["images"]) {
            GradedModule::Column c;
            for (const auto& e : col)
                c.push_back(ring_->parse(e.get<std::string>()));
            images.push_back(std::move(c));
        }
        auto phi = std::make_shared<const ModuleMap>(module(cmd, "source"), module(cmd, "target"), std::move(images));
        auto rep = quotient_iso_check(phi, lo, hi, topt_);
        out.doc = {{"window", {lo, hi}},
                   {"iso", rep.iso()},
                   {"kernel", to_string(rep.kernel)},
                   {"cokernel", to_string(rep.cokernel)},
                   {"witness_weight", opt_json(rep.witness_weight)}};
        if (!rep.note.empty())
            out.doc["note"] = rep.note;
        out.partial = rep.inconclusive();
        out.stats = fmt::format("iso={}", rep.iso());
    } else if (op == "ggm_duality_check") {
        const auto [lo, hi] = window(cmd);
        auto rep = ggm_duality_check(ring_, lo, hi, opt_);
        json cells = json::array();
        std::size_t undecided = 0;
        for (const auto& c : rep.cells) {
            const bool known = c.sheaf && c.dual;
            undecided += !known;
            json cj{{"j", c.j}, {"i", c.i}, {"sheaf", opt_json(c.sheaf)}, {"dual", opt_json(c.dual)},
                    {"status", known ? (c.pass ? "pass" : "fail") : "Inconclusive"}};
            if (!c.note.empty())
                cj["note"] = c.note;
            cells.push_back(std::move(cj));
        }
        out.doc = {{"n", rep.n},
                   {"twist", opt_json(rep.twist)},
                   {"matching_twists", rep.matching_twists},
                   {"pass", rep.pass()},
                   {"window", {lo, hi}},
                   {"cells", std::move(cells)}};
        if (!rep.note.empty())
            out.doc["note"] = rep.note;
        out.partial = undecided > 0;
        out.stats = fmt::format("twist={} pass={}", rep.twist ? std::to_string(*rep.twist) : "none", rep.pass());
    } else if (op == "graded_completion") {
        const auto [lo, hi] = window(cmd);
        auto m = module(cmd);
        auto rep = graded_completion(*m, gens(cmd), lo, hi, cmd.value("n_max", 16), opt_.span);
        Grid g{"weight", {}, {{"completion", {}}, {"module", {}}}};
        json rows = json::array();
        std::size_t undecided = 0;
        for (const auto& r : rep.rows) {
            g.weights.push_back(r.weight);
            g.rows[0].second.push_back(opt_cell(r.dim));
            g.rows[1].second.push_back(std::to_string(r.module_dim));
            undecided += !r.dim;
            rows.push_back({{"weight", r.weight}, {"dim", opt_json(r.dim)}, {"module_dim", r.module_dim},
                            {"chain", r.chain}});
        }
        out.doc = {{"window", {lo, hi}},
                   {"adic", to_string(rep.adic)},
                   {"derived", to_string(rep.derived)},
                   {"consistent", rep.consistent},
                   {"rows", std::move(rows)}};
        out.grid = std::move(g);
        out.partial = undecided > 0 || rep.adic == Completeness::Inconclusive ||
                      rep.derived == Completeness::Inconclusive;
        out.stats = fmt::format("adic={} derived={}", to_string(rep.adic), to_string(rep.derived));
    } else if (op == "derived_complete_check") {
        const auto [lo, hi] = window(cmd);
        auto m = module(cmd);
        auto rep = derived_complete_check(*m, gens(cmd), lo, hi, cmd.value("depth", 16), opt_.span);
        out.doc = {{"window", {lo, hi}}, {"verdict", to_string(rep.verdict)},
                   {"witness_weight", opt_json(rep.witness_weight)}};
        if (!rep.witness_element.empty())
            out.doc["witness_element"] = rep.witness_element;
        if (!rep.note.empty())
            out.doc["note"] = rep.note;
        out.partial = rep.verdict == Completeness::Inconclusive;
        out.stats = to_string(rep.verdict);
    } else if (op == "gamma_vanishing_on_localization") {
        const auto [lo, hi] = window(cmd);
        auto rep = gamma_vanishing_on_localization(ring_, ring_->parse(cmd["f"].get<std::string>()), gens(cmd), lo,
                                                   hi, opt_);
        const auto pairs = [](const std::vector<std::pair<int, int>>& v) {
            json a = json::array();
            for (const auto& [j, i] : v)
                a.push_back({{"j", j}, {"i", i}});
            return a;
        };
        out.doc = {{"window", {lo, hi}},           {"hypothesis", rep.hypothesis},
                   {"vanishes", rep.vanishes},     {"denominators", rep.denominators},
                   {"nonzero", pairs(rep.nonzero)}, {"inconclusive", pairs(rep.inconclusive)}};
        if (!rep.note.empty())
            out.doc["note"] = rep.note;
        out.partial = !rep.inconclusive.empty();
        out.stats = fmt::format("vanishes={} inconclusive={}", rep.vanishes, rep.inconclusive.size());
    } else if (op == "tower_limits") {
        auto m = module(cmd);
        const int i = cmd["weight"].get<int>();
        auto t = tower_limits(*m, ring_->parse(cmd["f"].get<std::string>()), i, cmd.value("depth", 16), opt_.span);
        out.doc = {{"weight", i},         {"lim", opt_json(t.lim)},           {"lim1", opt_json(t.lim1)},
                   {"depth", t.depth},    {"adaptive", t.adaptive},           {"stable_images", t.stable_images}};
        if (!t.note.empty())
            out.doc["note"] = t.note;
        out.partial = !t.lim || !t.lim1;
        out.stats = fmt::format("depth={}", t.depth);
    } else {
        throw ArgumentError("unknown op " + op);
    }
    return out;
}

std::string timestamp()
{
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
}

std::string render_tsv(const Grid& g, bool stamp)
{
    std::string out;
    if (stamp)
        out += "# generated " + timestamp() + "\n";
    out += g.corner;
    for (int w : g.weights)
        out += fmt::format("\t{}", w);
    out += "\n";
    for (const auto& [label, cells] : g.rows) {
        out += label;
        for (const auto& c : cells)
            out += "\t" + c.value_or("?");
        out += "\n";
    }
    return out;
}

void write_atomic(const fs::path& path, const std::string& content)
{
    if (path == "-") {
        std::cout << content << std::flush;
        return;
    }
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error("cannot open " + tmp.string() + " for writing");
        f << content;
        if (!f.flush())
            throw Error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

}  // namespace

std::string canonical_op(const std::string& name)
{
    if (kOps.count(name))
        return name;
    if (auto it = kAliases.find(name); it != kAliases.end())
        return it->second;
    return {};
}

void validate_session(const json& session, const std::string& text) { validate(session, text); }

json parse_session(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(fmt::format("line {}: malformed JSON ({})", line, e.what()), line);
    }
}

SessionResult run_session(const json& session, const fs::path& base_dir, const Overrides& overrides,
                          const Logger& log)
{
    SessionResult res;
    const auto say = [&](const std::string& s) {
        if (log)
            log(s);
    };
    std::unique_ptr<Context> ctx;
    try {
        validate(session, {});
        ctx = std::make_unique<Context>(session, overrides);
    } catch (const Error& e) {
        res.error = e.what();
        say("error: " + res.error);
        return res;
    }
    say(fmt::format("ring {} over {}, jobs {}", ctx->ring()->describe(), ctx->field().to_string(),
                    ctx->options().jobs));

    const auto& commands = session["commands"];
    for (std::size_t c = 0; c < commands.size(); ++c) {
        const json& cmd = commands[c];
        CommandResult r;
        r.op = canonical_op(cmd["op"].get<std::string>());
        r.output = cmd["output"].get<std::string>();
        const fs::path out_path = r.output == "-" ? fs::path("-") : base_dir / r.output;
        const auto start = std::chrono::steady_clock::now();
        try {
            Outcome o = ctx->run(r.op, cmd);
            const bool tsv = out_path.extension() == ".tsv";
            std::string content;
            if (tsv) {
                if (!o.grid)
                    throw ArgumentError(r.op + " has no tabular form; use a .json output");
                content = render_tsv(*o.grid, overrides.timestamp);
            } else {
                json doc = std::move(o.doc);
                doc["op"] = r.op;
                doc["field"] = ctx->field().to_string();
                doc["ring"] = ctx->ring()->describe();
                for (const char* k : {"module", "source", "target"})
                    if (cmd.contains(k))
                        doc[k] = cmd[k];
                doc["status"] = o.partial ? "partial" : "complete";
                if (overrides.timestamp)
                    doc["_generated"] = timestamp();
                content = doc.dump(2) + "\n";
            }
            write_atomic(out_path, content);
            r.ok = true;
            r.partial = o.partial;
            r.stats = o.stats;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (r.ok)
            say(fmt::format("[{}/{}] {} -> {}: {}{} in {:.3f} s", c + 1, commands.size(), r.op, r.output, r.stats,
                            r.partial ? " (partial)" : "", r.seconds));
        else
            say(fmt::format("[{}/{}] {} failed: {}", c + 1, commands.size(), r.op, r.error));
        res.commands.push_back(std::move(r));
    }
    return res;
}

SessionResult run_session_file(const fs::path& path, const Overrides& overrides, const Logger& log)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        SessionResult res;
        res.error = "cannot read " + path.string();
        if (log)
            log("error: " + res.error);
        return res;
    }
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    json session;
    try {
        session = parse_session(text);
        validate(session, text);
    } catch (const ParseError& e) {
        SessionResult res;
        res.error = e.what();
        if (log)
            log("error: " + res.error);
        return res;
    }
    return run_session(session, fs::current_path(), overrides, log);
}

}  // namespace ggm
