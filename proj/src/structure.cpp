#include "causalog/structure.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "causalog/errors.hpp"
#include "json.hpp"

namespace causalog {

using json = nlohmann::ordered_json;

std::string DomainAtom::render() const {
    if (args.empty()) return pred;
    return pred + render_tuple(args);
}

const char* to_string(TruthValue v) {
    switch (v) {
        case TruthValue::True:
            return "true";
        case TruthValue::False:
            return "false";
        default:
            return "unknown";
    }
}

// ---------------------------------------------------------------------------
// Structure

void Structure::set_int_range(std::optional<IntRange> r) {
    ints_ = r;
    rebuild_domain();
}

void Structure::add_element(const DomainElement& e) {
    if (e.is_integer()) return;
    if (stored_.insert(e).second) rebuild_domain();
}

bool Structure::contains(const DomainElement& e) const {
    if (e.is_integer()) return ints_ && ints_->contains(e.value);
    return stored_.count(e) > 0;
}

std::vector<DomainElement> Structure::created() const {
    std::vector<DomainElement> out;
    for (const auto& e : stored_)
        if (e.is_created()) out.push_back(e);
    return out;
}

void Structure::rebuild_domain() {
    domain_.clear();
    for (const auto& e : stored_)
        if (e.is_named()) domain_.push_back(e);
    if (ints_)
        for (auto v = ints_->lo; v <= ints_->hi; ++v) domain_.push_back(DomainElement::integer(v));
    for (const auto& e : stored_)
        if (e.is_created()) domain_.push_back(e);
}

void Structure::set_constant(const std::string& name, DomainElement value) {
    add_element(value);
    constants_[name] = std::move(value);
}

DomainElement Structure::constant(const std::string& name) const {
    auto it = constants_.find(name);
    return it == constants_.end() ? DomainElement::named(name) : it->second;
}

void Structure::declare(const std::string& pred) { relations_[pred]; }

void Structure::add_fact(const DomainAtom& a) {
    for (const auto& e : a.args) add_element(e);
    relations_[a.pred].insert(a.args);
}

void Structure::remove_relation(const std::string& pred) { relations_.erase(pred); }

bool Structure::holds(const std::string& pred, const Tuple& args) const {
    auto it = relations_.find(pred);
    return it != relations_.end() && it->second.count(args) > 0;
}

std::vector<DomainAtom> Structure::true_atoms() const {
    std::vector<DomainAtom> out;
    for (const auto& [pred, tuples] : relations_)
        for (const auto& t : tuples) out.push_back({pred, t});
    return out;
}

Structure Structure::renamed(const std::map<DomainElement, DomainElement>& rename) const {
    auto map = [&](const DomainElement& e) {
        auto it = rename.find(e);
        return it == rename.end() ? e : it->second;
    };
    Structure out;
    out.ints_ = ints_;
    for (const auto& e : stored_) out.stored_.insert(map(e));
    out.rebuild_domain();
    for (const auto& [name, v] : constants_) out.constants_[name] = map(v);
    for (const auto& [pred, tuples] : relations_) {
        auto& rel = out.relations_[pred];
        for (const auto& t : tuples) {
            Tuple m;
            m.reserve(t.size());
            for (const auto& e : t) m.push_back(map(e));
            rel.insert(std::move(m));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// PartialStructure

PartialStructure::PartialStructure(Structure base, std::set<std::string> endogenous)
    : base_(std::move(base)), endogenous_(std::move(endogenous)) {}

PartialStructure PartialStructure::from_total(const Structure& s, const std::set<std::string>& endogenous) {
    Structure base = s;
    for (const auto& p : endogenous) base.remove_relation(p);
    PartialStructure ps(std::move(base), endogenous);
    for (const auto& p : endogenous) {
        auto it = s.relations().find(p);
        if (it == s.relations().end()) continue;
        for (const auto& t : it->second) ps.set({p, t}, TruthValue::True);
    }
    return ps;
}

TruthValue PartialStructure::value(const DomainAtom& a) const {
    if (!endogenous_.count(a.pred)) return base_.holds(a) ? TruthValue::True : TruthValue::False;
    auto it = overlay_.find(a);
    return it == overlay_.end() ? default_ : it->second;
}

void PartialStructure::set(const DomainAtom& a, TruthValue v) {
    if (v == default_)
        overlay_.erase(a);
    else
        overlay_[a] = v;
}

TruthValue PartialStructure::exists(const DomainElement& e) const {
    auto it = existence_.find(e);
    return it == existence_.end() ? TruthValue::True : it->second;
}

void PartialStructure::set_exists(const DomainElement& e, TruthValue v) { existence_[e] = v; }

bool PartialStructure::is_total() const {
    if (default_ == TruthValue::Unknown) return false;
    for (const auto& [a, v] : overlay_)
        if (v == TruthValue::Unknown) return false;
    for (const auto& [e, v] : existence_)
        if (v == TruthValue::Unknown) return false;
    return true;
}

bool PartialStructure::less_precise_than(const PartialStructure& finer) const {
    for (const auto& [a, v] : overlay_)
        if (v == TruthValue::True && finer.value(a) != TruthValue::True) return false;
    for (const auto& [a, v] : finer.overlay_)
        if (value(a) == TruthValue::False && v != TruthValue::False) return false;
    for (const auto& [e, v] : existence_)
        if (v != TruthValue::Unknown && finer.exists(e) != v) return false;
    return true;
}

std::vector<DomainAtom> PartialStructure::unknown_atoms() const {
    std::vector<DomainAtom> out;
    for (const auto& [a, v] : overlay_)
        if (v == TruthValue::Unknown) out.push_back(a);
    std::sort(out.begin(), out.end());
    return out;
}

Structure PartialStructure::project() const {
    Structure out;
    out.set_int_range(base_.int_range());
    for (const auto& e : base_.domain())
        if (!e.is_integer() && exists(e) == TruthValue::True) out.add_element(e);
    for (const auto& [name, v] : base_.constants()) out.set_constant(name, v);
    for (const auto& [pred, tuples] : base_.relations()) {
        out.declare(pred);
        for (const auto& t : tuples) out.add_fact(pred, t);
    }
    for (const auto& p : endogenous_) out.declare(p);
    std::vector<DomainAtom> atoms;
    for (const auto& [a, v] : overlay_)
        if (v == TruthValue::True) atoms.push_back(a);
    std::sort(atoms.begin(), atoms.end());
    for (const auto& a : atoms) out.add_fact(a);
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

DomainElement parse_created_name(const std::string& s) {
    if (s.size() < 3 || s.rfind("_p", 0) != 0 ||
        !std::all_of(s.begin() + 2, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ValidationError("created element '" + s + "' must be named _p<N>");
    return DomainElement::created(std::stoll(s.substr(2)), "");
}

Structure load_json(std::string_view text, const Vocabulary& voc, const std::set<std::string>* reject_endogenous,
                    bool allow_created) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed structure JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("structure must be a JSON object");

    Structure s;
    s.set_int_range(voc.ints);
    std::set<std::string> created_names;

    if (doc.contains("int")) {
        const auto& r = doc["int"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
            throw ValidationError("'int' must be [lo, hi]");
        IntRange range{r[0].get<std::int64_t>(), r[1].get<std::int64_t>()};
        if (range.hi < range.lo) throw ValidationError("'int' range is empty");
        s.set_int_range(range);
    }
    if (doc.contains("domain")) {
        if (!doc["domain"].is_array()) throw ValidationError("'domain' must be a list of names");
        for (const auto& n : doc["domain"]) {
            if (!n.is_string()) throw ValidationError("'domain' must be a list of names");
            s.add_element(DomainElement::named(n.get<std::string>()));
        }
    }
    if (doc.contains("created")) {
        if (!allow_created) throw ValidationError("exogenous input cannot contain created elements");
        for (const auto& n : doc["created"]) {
            if (!n.is_string()) throw ValidationError("'created' must be a list of names");
            created_names.insert(n.get<std::string>());
            s.add_element(parse_created_name(n.get<std::string>()));
        }
    }
    for (const auto& c : voc.constants) {
        if (doc.contains(c)) continue;
        s.set_constant(c, DomainElement::named(c));
    }

    auto element = [&](const json& v, const std::string& where) -> DomainElement {
        if (v.is_number_integer()) {
            auto e = DomainElement::integer(v.get<std::int64_t>());
            if (!s.contains(e)) throw ValidationError("element " + v.dump() + " in " + where + " is outside the domain");
            return e;
        }
        if (v.is_string()) {
            const auto name = v.get<std::string>();
            DomainElement e = created_names.count(name) ? parse_created_name(name) : DomainElement::named(name);
            if (!s.contains(e)) throw ValidationError("element '" + name + "' in " + where + " is outside the domain");
            return e;
        }
        throw ValidationError("elements must be names or integers in " + where);
    };

    for (const auto& p : voc.predicates)
        if (!(reject_endogenous && reject_endogenous->count(p.name))) s.declare(p.name);

    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "domain" || key == "int" || key == "created") continue;
        if (voc.has_constant(key)) {
            s.set_constant(key, element(it.value(), key));
            continue;
        }
        const auto* decl = voc.find_predicate(key);
        if (!decl) throw ValidationError("unknown symbol '" + key + "'");
        if (reject_endogenous && reject_endogenous->count(key))
            throw ValidationError("endogenous symbol '" + key + "' cannot be given a value");
        const auto& v = it.value();
        if (decl->arity == 0) {
            if (!v.is_boolean()) throw ValidationError("propositional symbol '" + key + "' needs true/false");
            if (v.get<bool>()) s.add_fact(key, {});
            continue;
        }
        if (!v.is_array()) throw ValidationError("relation '" + key + "' must be a list of tuples");
        for (const auto& tup : v) {
            if (!tup.is_array() || static_cast<int>(tup.size()) != decl->arity)
                throw ValidationError("arity mismatch in relation '" + key + "'");
            Tuple t;
            for (const auto& x : tup) t.push_back(element(x, key));
            s.add_fact(key, std::move(t));
        }
    }
    return s;
}

json element_json(const DomainElement& e) {
    if (e.is_integer()) return e.value;
    return e.render();
}

}  // namespace

Structure load_structure(std::string_view json_text, const Vocabulary& voc, const std::set<std::string>& endogenous) {
    return load_json(json_text, voc, &endogenous, false);
}

Structure load_model(std::string_view json_text, const Vocabulary& voc) {
    return load_json(json_text, voc, nullptr, true);
}

std::string structure_to_json(const Structure& s, const Vocabulary& voc) {
    json out;
    json domain = json::array();
    json created = json::array();
    for (const auto& e : s.domain()) {
        if (e.is_named()) domain.push_back(e.render());
        if (e.is_created()) created.push_back(e.render());
    }
    out["domain"] = domain;
    if (s.int_range()) out["int"] = {s.int_range()->lo, s.int_range()->hi};
    out["created"] = created;
    for (const auto& p : voc.predicates) {
        auto it = s.relations().find(p.name);
        if (it == s.relations().end()) continue;
        if (p.arity == 0) {
            out[p.name] = !it->second.empty();
            continue;
        }
        json rel = json::array();
        for (const auto& t : it->second) {
            json tup = json::array();
            for (const auto& e : t) tup.push_back(element_json(e));
            rel.push_back(tup);
        }
        out[p.name] = rel;
    }
    for (const auto& c : voc.constants) out[c] = element_json(s.constant(c));
    return out.dump();
}

Structure default_extension(const Structure& exo, const Vocabulary& voc, const std::set<std::string>& endogenous) {
    Structure out = exo;
    for (const auto& p : voc.predicates)
        if (endogenous.count(p.name)) {
            out.remove_relation(p.name);
            out.declare(p.name);
        }
    return out;
}

Structure without_predicates(const Structure& s, const std::set<std::string>& drop) {
    Structure out = s;
    for (const auto& p : drop) out.remove_relation(p);
    return out;
}

// ---------------------------------------------------------------------------
// Canonical forms modulo created elements

namespace {

std::string key_text(const Structure& s) {
    std::ostringstream out;
    out << "D";
    for (const auto& e : s.domain())
        if (!e.is_integer()) out << " " << (e.is_created() ? "*" : "") << e.render();
    if (s.int_range()) out << "|I" << s.int_range()->lo << ".." << s.int_range()->hi;
    for (const auto& [c, v] : s.constants()) out << "|C" << c << "=" << v.render();
    for (const auto& [pred, tuples] : s.relations()) {
        out << "|R" << pred << ":";
        std::vector<std::string> rows;
        for (const auto& t : tuples) rows.push_back(render_tuple(t));
        std::sort(rows.begin(), rows.end());
        for (const auto& r : rows) out << r;
    }
    return out.str();
}

}  // namespace

std::pair<Structure, std::string> canonicalize(const Structure& s) {
    const auto created = s.created();
    if (created.empty()) return {s, key_text(s)};

    const std::size_t n = created.size();
    std::map<DomainElement, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[created[i]] = i;

    // Colour refinement: each element's signature lists the facts it occurs in, with created
    // elements replaced by their current colour and the element itself marked.
    std::vector<std::size_t> color(n, 0);
    for (std::size_t round = 0; round <= n; ++round) {
        std::vector<std::string> sig(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> parts;
            for (const auto& [pred, tuples] : s.relations()) {
                for (const auto& t : tuples) {
                    if (std::find(t.begin(), t.end(), created[i]) == t.end()) continue;
                    std::string row = pred + "(";
                    for (const auto& e : t) {
                        if (e == created[i])
                            row += "@,";
                        else if (e.is_created())
                            row += "#" + std::to_string(color[index[e]]) + ",";
                        else
                            row += e.render() + ",";
                    }
                    parts.push_back(row + ")");
                }
            }
            for (const auto& [c, v] : s.constants())
                if (v == created[i]) parts.push_back("const " + c);
            std::sort(parts.begin(), parts.end());
            sig[i] = std::to_string(color[i]) + "{";
            for (const auto& p : parts) sig[i] += p + ";";
        }
        std::vector<std::string> sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin();
        if (next == color) break;
        color = next;
    }

    // Order by colour; try every ordering within colour classes and keep the smallest key.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return color[a] != color[b] ? color[a] < color[b] : a < b; });
    std::vector<std::pair<std::size_t, std::size_t>> classes;  // [begin, end) in order
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && color[order[j]] == color[order[i]]) ++j;
        classes.push_back({i, j});
        i = j;
    }

    std::optional<std::pair<Structure, std::string>> best;
    while (true) {
        std::map<DomainElement, DomainElement> rename;
        for (std::size_t pos = 0; pos < n; ++pos) {
            const auto& e = created[order[pos]];
            rename[e] = DomainElement::created(static_cast<std::int64_t>(pos + 1), e.name);
        }
        Structure candidate = s.renamed(rename);
        std::string key = key_text(candidate);
        if (!best || key < best->second) best = {std::move(candidate), std::move(key)};
        // advance the product of per-class permutations
        bool advanced = false;
        for (auto it = classes.rbegin(); it != classes.rend(); ++it) {
            if (std::next_permutation(order.begin() + it->first, order.begin() + it->second)) {
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return *best;
}

bool equal_modulo_created(const Structure& m1, const Structure& m2, const std::set<std::string>& aux) {
    return canonicalize(without_predicates(m1, aux)).second == canonicalize(without_predicates(m2, aux)).second;
}

}  // namespace causalog
