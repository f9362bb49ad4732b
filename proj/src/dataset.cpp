#include "topk/dataset.hpp"

#include "topk/engine.hpp"
#include "topk/error.hpp"

#include <array>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace topk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw ValidationError("write failed: " + path.string());
    }
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_score(const std::string& text, const fs::path& file)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(text.substr(used)) != "") {
        throw ValidationError(file.filename().string() + ": not a number: '" + text + "'");
    }
    return v;
}

// Data rows of a CSV file (header dropped), each with exactly `width` fields.
std::vector<std::vector<std::string>> data_rows(const fs::path& path, std::size_t width)
{
    auto rows = parse_csv(read_file(path));
    if (rows.empty()) {
        throw ValidationError(path.filename().string() + ": empty file");
    }
    rows.erase(rows.begin());
    for (auto& row : rows) {
        if (row.size() != width) {
            throw ValidationError(path.filename().string() + ": expected "
                                  + std::to_string(width) + " columns");
        }
        for (auto& f : row) {
            f = trim(f);
        }
    }
    return rows;
}

std::string format_score(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;  // current row has content
    auto end_row = [&] {
        if (any) {
            row.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            any = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            any = true;
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            break;
        default:
            field += c;
            any = true;
        }
    }
    if (quoted) {
        throw ValidationError("unterminated quoted CSV field");
    }
    end_row();
    return rows;
}

ScoringSpec spec_from_json(const json& j)
{
    try {
        std::vector<Construct> constructs;
        for (const auto& c : j.at("constructs")) {
            constructs.push_back(Construct{c.at("name").get<std::string>(), c.at("arity").get<int>(),
                                           c.value("weight", 1.0), c.value("definition", "")});
        }
        const auto range = j.at("range").get<std::vector<double>>();
        if (range.size() != 2) {
            throw ValidationError("spec range must be [min, max]");
        }
        const auto agg = j.value("aggregation", std::string("sum"));
        if (agg != "sum") {
            throw ValidationError("unsupported aggregation: " + agg);
        }
        return ScoringSpec(std::move(constructs), range[0], range[1], j.at("step").get<double>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("spec.json: ") + e.what());
    }
}

json spec_to_json(const ScoringSpec& spec)
{
    json constructs = json::array();
    for (const auto& c : spec.constructs()) {
        constructs.push_back(
            {{"name", c.name}, {"arity", c.arity}, {"weight", c.weight}, {"definition", c.definition}});
    }
    return {{"constructs", constructs},
            {"range", {spec.min_score(), spec.max_score()}},
            {"step", spec.grid_step()},
            {"aggregation", "sum"}};
}

Problem load_problem(const fs::path& dir, std::size_t k, std::optional<std::size_t> cap)
{
    json spec_json;
    try {
        spec_json = json::parse(read_file(dir / "spec.json"));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("spec.json: ") + e.what());
    }
    ScoringSpec spec = spec_from_json(spec_json);

    std::vector<EntityId> entities;
    std::map<EntityId, std::string> context;
    std::set<EntityId> seen;
    for (auto& row : data_rows(dir / "entities.csv", 3)) {
        EntityId id(row[0]);
        if (!seen.insert(id).second) {
            throw ValidationError("duplicate entity id: " + row[0]);
        }
        context[id] = row[2].empty() ? row[1] : row[1] + ": " + row[2];
        entities.push_back(std::move(id));
    }
    if (entities.empty()) {
        throw ValidationError("entities.csv: no entities");
    }

    auto entity = [&](const std::string& s, const fs::path& file) {
        EntityId id(s);
        if (!seen.contains(id)) {
            throw ValidationError(file.filename().string() + ": unknown entity id " + s);
        }
        return id;
    };

    std::map<Question, double> truth;
    for (std::size_t ci = 0; ci < spec.constructs().size(); ++ci) {
        const auto& c = spec.construct(ci);
        const auto file = dir / (c.name + ".csv");
        const auto arity = static_cast<std::size_t>(c.arity);
        const auto rows = data_rows(file, arity + 1);
        if (rows.empty()) {
            throw ValidationError(file.filename().string() + ": no score rows for " + c.name);
        }
        for (const auto& row : rows) {
            std::vector<EntityId> args;
            for (std::size_t a = 0; a < arity; ++a) {
                args.push_back(entity(row[a], file));
            }
            const auto q = Question::make(ci, std::move(args));
            const double v = parse_score(row[arity], file);
            (void)spec.to_tick(v);
            auto [it, inserted] = truth.emplace(q, v);
            if (!inserted && it->second != v) {
                throw ValidationError(file.filename().string() + ": conflicting scores for "
                                      + to_string(q, spec));
            }
        }
    }

    KnownStore knowns;
    if (fs::exists(dir / "known.csv")) {
        const auto file = dir / "known.csv";
        auto rows = parse_csv(read_file(file));
        if (!rows.empty()) {
            rows.erase(rows.begin());
        }
        for (auto& row : rows) {
            while (!row.empty() && trim(row.back()).empty()) {
                row.pop_back();
            }
            if (row.empty()) {
                continue;
            }
            const auto ci = spec.construct_index(trim(row[0]));
            if (row.size() != static_cast<std::size_t>(spec.construct(ci).arity) + 1) {
                throw ValidationError("known.csv: wrong number of ids for " + trim(row[0]));
            }
            std::vector<EntityId> args;
            for (std::size_t a = 1; a < row.size(); ++a) {
                args.push_back(entity(trim(row[a]), file));
            }
            const auto q = Question::make(ci, std::move(args));
            auto it = truth.find(q);
            if (it == truth.end()) {
                throw ValidationError("known.csv: no score for " + to_string(q, spec));
            }
            knowns = record_response(std::move(knowns), spec, q, it->second);
        }
    }

    std::string query;
    if (fs::exists(dir / "query.txt")) {
        query = trim(read_file(dir / "query.txt"));
        while (!query.empty() && query.back() == '\n') {
            query.pop_back();
        }
    }

    Problem p{
        .entities = entities,
        .spec = std::move(spec),
        .k = k,
        .candidates = enumerate_candidates(entities, k, cap),
        .knowns = std::move(knowns),
        .ground_truth = std::move(truth),
        .entity_context = std::move(context),
        .query_text = std::move(query),
    };
    validate(p);
    return p;
}

void save_problem(const Problem& p, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_file(dir / "spec.json", spec_to_json(p.spec).dump(2) + "\n");

    std::string entities = "id,displayName,contextText\n";
    for (const auto& e : p.entities) {
        auto it = p.entity_context.find(e);
        const std::string text = it == p.entity_context.end() ? "" : it->second;
        // The context goes in displayName so a reload rebuilds it verbatim.
        entities += csv_field(e.str()) + "," + csv_field(text) + ",\n";
    }
    write_file(dir / "entities.csv", entities);

    for (std::size_t ci = 0; ci < p.spec.constructs().size(); ++ci) {
        const auto& c = p.spec.construct(ci);
        std::string text;
        for (int a = 0; a < c.arity; ++a) {
            text += std::string(1, static_cast<char>('a' + a)) + ",";
        }
        text += "score\n";
        if (p.ground_truth) {
            for (const auto& [q, v] : *p.ground_truth) {
                if (q.construct != ci) {
                    continue;
                }
                for (const auto& a : q.args) {
                    text += csv_field(a.str()) + ",";
                }
                text += format_score(v) + "\n";
            }
        }
        write_file(dir / (c.name + ".csv"), text);
    }

    std::string known = "construct,a,b\n";
    for (const auto& [q, v] : p.knowns.answers()) {
        known += csv_field(p.spec.construct(q.construct).name);
        for (const auto& a : q.args) {
            known += "," + csv_field(a.str());
        }
        known += "\n";
    }
    write_file(dir / "known.csv", known);
    write_file(dir / "query.txt", p.query_text + "\n");
}

ScoringSpec default_spec(double grid_step)
{
    return ScoringSpec({Construct{"Rel", 1, 1.0, "how well the item matches the request"},
                        Construct{"Div", 2, 1.0, "how different the two items are"}},
                       0.0, 1.0, grid_step);
}

Problem generate_synthetic(std::size_t n, std::size_t k, std::optional<std::size_t> cap,
                           std::uint64_t seed, const ScoringSpec& spec)
{
    if (k == 0 || k > n) {
        throw ValidationError("synthetic instance needs 1 <= k <= n");
    }
    const auto width = std::to_string(n).size();
    std::vector<EntityId> entities;
    std::map<EntityId, std::string> context;
    for (std::size_t i = 1; i <= n; ++i) {
        auto digits = std::to_string(i);
        digits.insert(0, width - digits.size(), '0');
        entities.emplace_back("E" + digits);
        context[entities.back()] = "item " + digits;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> tick(0, spec.grid_ticks());
    std::map<Question, double> truth;
    // One question per construct and entity tuple, in universe order.
    const std::array<Candidate, 1> everyone{Candidate::make(0, entities)};
    for (const auto& q : build_question_universe(spec, everyone)) {
        truth.emplace(q, spec.from_tick(tick(rng)));
    }
    Problem p{
        .entities = entities,
        .spec = spec,
        .k = k,
        .candidates = enumerate_candidates(entities, k, cap),
        .knowns = {},
        .ground_truth = std::move(truth),
        .entity_context = std::move(context),
        .query_text = "synthetic",
    };
    return p;
}

}  // namespace topk
