#include "causalog/grounder.hpp"

#include <algorithm>

#include "causalog/errors.hpp"

namespace causalog {

std::string ChoicePoint::key() const { return occ + "[" + subst.render() + "]"; }

std::string ChoicePoint::render_option(int option) const {
    if (option < 0) return "none";
    switch (kind) {
        case Kind::Or: return option == 0 ? "left" : "right";
        case Kind::Select: return render_tuple(options.at(option));
        case Kind::New: return options.at(option).at(0).render();
    }
    return "?";
}

const char* to_string(ChoicePoint::Kind k) {
    switch (k) {
        case ChoicePoint::Kind::Or: return "or";
        case ChoicePoint::Kind::Select: return "select";
        case ChoicePoint::Kind::New: return "new";
    }
    return "?";
}

int GroundTree::find(const std::string& key) const {
    auto it = index.find(key);
    return it == index.end() ? -1 : it->second;
}

namespace {

/// Path context while descending: conditions, required elements and commitments seen so far.
struct Context {
    std::vector<Formula> guard;
    std::vector<DomainElement> needs;
    std::vector<Commitment> commitments;
    TruthValue value = TruthValue::True;  // static value of the guard

    Context committed(int cp, int option) const {
        Context c = *this;
        c.commitments.push_back({cp, option});
        return c;
    }
};

GroundNodePtr empty_node(const std::string& occ) {
    auto n = std::make_shared<GroundNode>();
    n->kind = GroundNode::Kind::And;
    n->occ = occ;
    return n;
}

void enumerate_tuples(const std::vector<DomainElement>& dom, std::size_t arity,
                      const std::function<void(const Tuple&)>& fn) {
    Tuple t(arity);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == arity) {
            fn(t);
            return;
        }
        for (const auto& d : dom) {
            t[i] = d;
            rec(i + 1);
        }
    };
    rec(0);
}

class Builder {
public:
    Builder(const Structure& dom, GroundTree& tree, const GroundOptions& opts) : dom_(dom), tree_(tree), opts_(opts) {}

    GroundNodePtr build(const Cee& c, const Bindings& env, const Context& ctx) {
        return std::visit([&](const auto& n) { return visit(c, n, env, ctx); }, c.node);
    }

    GroundNodePtr instance(const ChoicePoint& cp, int option, const Cee& body, const Bindings& env) {
        Context ctx;
        ctx.guard = cp.guard;
        ctx.needs = cp.needs;
        ctx.commitments = cp.commitments;
        ctx.value = cp.static_guard;
        ctx = ctx.committed(tree_.find(cp.key()), option);
        auto child = build(body, env, ctx);
        return child ? child : empty_node(body.occ);
    }

private:
    const Structure& dom_;
    GroundTree& tree_;
    const GroundOptions& opts_;

    TruthValue static_value(const Formula& f) const {
        return opts_.static_view ? eval3(f, *opts_.static_view) : TruthValue::Unknown;
    }
    TruthValue static_exists(const DomainElement& e) const {
        return opts_.static_view ? opts_.static_view->exists(e) : TruthValue::Unknown;
    }
    bool pruning() const { return opts_.static_view != nullptr; }

    /// Context extended with an instantiated condition and the created elements it binds.
    Context extend(const Context& ctx, const Formula& cond, const Tuple& bound) const {
        Context c = ctx;
        c.guard.push_back(cond);
        c.value = tv_and(c.value, static_value(cond));
        for (const auto& e : bound)
            if (e.is_created() && std::find(c.needs.begin(), c.needs.end(), e) == c.needs.end()) {
                c.needs.push_back(e);
                c.value = tv_and(c.value, static_exists(e));
            }
        return c;
    }

    int register_cp(ChoicePoint cp, const Context& ctx) {
        cp.guard = ctx.guard;
        cp.needs = ctx.needs;
        cp.commitments = ctx.commitments;
        cp.static_guard = pruning() ? ctx.value : TruthValue::Unknown;
        int id = static_cast<int>(tree_.choice_points.size());
        tree_.index.emplace(cp.key(), id);
        tree_.choice_points.push_back(std::move(cp));
        return id;
    }

    GroundNodePtr visit(const Cee& c, const Cee::Atom& n, const Bindings& env, const Context&) {
        auto head = ground_atom(n.pred, n.args, dom_, env);
        if (!head) return nullptr;
        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::Atom;
        node->occ = c.occ;
        node->head = std::move(head);
        return node;
    }

    GroundNodePtr visit(const Cee& c, const Cee::If& n, const Bindings& env, const Context& ctx) {
        Formula cond = substitute(n.condition, env, dom_);
        Context inner = extend(ctx, cond, {});
        if (pruning() && inner.value == TruthValue::False) return nullptr;
        auto body = build(*n.body, env, inner);
        if (!body) return nullptr;
        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::If;
        node->occ = c.occ;
        node->condition = std::move(cond);
        node->children.push_back(std::move(body));
        return node;
    }

    GroundNodePtr visit(const Cee& c, const Cee::And& n, const Bindings& env, const Context& ctx) {
        auto a = build(*n.lhs, env, ctx);
        auto b = build(*n.rhs, env, ctx);
        if (!a) return b;
        if (!b) return a;
        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::And;
        node->occ = c.occ;
        node->children = {std::move(a), std::move(b)};
        return node;
    }

    GroundNodePtr visit(const Cee& c, const Cee::Or& n, const Bindings& env, const Context& ctx) {
        ChoicePoint cp;
        cp.kind = ChoicePoint::Kind::Or;
        cp.occ = c.occ;
        cp.subst = env;
        int id = register_cp(std::move(cp), ctx);
        auto a = build(*n.lhs, env, ctx.committed(id, 0));
        auto b = build(*n.rhs, env, ctx.committed(id, 1));
        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::Or;
        node->occ = c.occ;
        node->cp = id;
        node->children = {a ? a : empty_node(n.lhs->occ), b ? b : empty_node(n.rhs->occ)};
        return node;
    }

    GroundNodePtr visit(const Cee& c, const Cee::All& n, const Bindings& env, const Context& ctx) {
        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::And;
        node->occ = c.occ;
        enumerate_tuples(dom_.domain(), n.vars.size(), [&](const Tuple& t) {
            Bindings inner_env = env;
            for (std::size_t i = 0; i < t.size(); ++i) inner_env.push(n.vars[i], t[i]);
            Formula qual = substitute(n.qual, inner_env, dom_);
            Context inner = extend(ctx, qual, t);
            if (pruning() && inner.value == TruthValue::False) return;
            auto body = build(*n.body, inner_env, inner);
            if (!body) return;
            auto inst = std::make_shared<GroundNode>();
            inst->kind = GroundNode::Kind::If;
            inst->occ = c.occ;
            inst->condition = std::move(qual);
            for (const auto& e : t)
                if (e.is_created()) inst->needs.push_back(e);
            inst->children.push_back(std::move(body));
            node->children.push_back(std::move(inst));
        });
        if (pruning() && node->children.empty()) return nullptr;
        return node;
    }

    GroundNodePtr visit(const Cee& c, const Cee::Select& n, const Bindings& env, const Context& ctx) {
        ChoicePoint cp;
        cp.kind = ChoicePoint::Kind::Select;
        cp.occ = c.occ;
        cp.subst = env;
        cp.vars = n.vars;
        cp.qualification = n.qual;
        int id = register_cp(std::move(cp), ctx);

        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::Select;
        node->occ = c.occ;
        node->cp = id;
        std::vector<Tuple> options;
        bool certain_candidate = false;
        enumerate_tuples(dom_.domain(), n.vars.size(), [&](const Tuple& t) {
            Bindings inner_env = env;
            for (std::size_t i = 0; i < t.size(); ++i) inner_env.push(n.vars[i], t[i]);
            Formula qual = substitute(n.qual, inner_env, dom_);
            TruthValue qv = static_value(qual);
            if (pruning() && qv == TruthValue::False) return;
            int option = static_cast<int>(options.size());
            Context inner = extend(ctx.committed(id, option), qual, t);
            bool binds_created = std::any_of(t.begin(), t.end(), [](const auto& e) { return e.is_created(); });
            if (qv == TruthValue::True && !binds_created) certain_candidate = true;
            auto body = build(*n.body, inner_env, inner);
            auto inst = std::make_shared<GroundNode>();
            inst->kind = GroundNode::Kind::If;
            inst->occ = c.occ;
            inst->condition = std::move(qual);
            for (const auto& e : t)
                if (e.is_created()) inst->needs.push_back(e);
            inst->children.push_back(body ? body : empty_node(n.body->occ));
            node->children.push_back(std::move(inst));
            options.push_back(t);
        });
        auto& stored = tree_.choice_points[id];
        stored.options = std::move(options);
        stored.none_allowed = !(pruning() && ctx.value == TruthValue::True && certain_candidate);
        return node;
    }

    GroundNodePtr visit(const Cee& c, const Cee::New& n, const Bindings& env, const Context& ctx) {
        ChoicePoint cp;
        cp.kind = ChoicePoint::Kind::New;
        cp.occ = c.occ;
        cp.subst = env;
        cp.vars = {n.var};
        int id = register_cp(std::move(cp), ctx);
        tree_.choice_points[id].none_allowed = !(pruning() && ctx.value == TruthValue::True);

        auto node = std::make_shared<GroundNode>();
        node->kind = GroundNode::Kind::New;
        node->occ = c.occ;
        node->cp = id;
        node->body = n.body.shared();
        node->var = n.var;
        node->env = env;
        std::vector<DomainElement> slots;
        if (opts_.new_slots) slots = opts_.new_slots(tree_.choice_points[id]);
        for (std::size_t i = 0; i < slots.size(); ++i) {
            auto body = build(*n.body, env.with(n.var, slots[i]), ctx.committed(id, static_cast<int>(i)));
            node->children.push_back(body ? body : empty_node(n.body->occ));
            tree_.choice_points[id].options.push_back({slots[i]});
        }
        return node;
    }
};

}  // namespace

GroundNodePtr ground(const Cee& cee, const Structure& domain, GroundTree& tree, const GroundOptions& opts) {
    Builder b(domain, tree, opts);
    auto root = b.build(cee, {}, {});
    return root ? root : empty_node(cee.occ);
}

GroundTree ground_theory(const Theory& t, const Structure& domain, const GroundOptions& opts) {
    GroundTree tree;
    for (const auto& c : t.cees) tree.roots.push_back(ground(c, domain, tree, opts));
    return tree;
}

int extend_new(GroundTree& tree, GroundNode& node, const DomainElement& element, const Structure& domain,
               const GroundOptions& opts) {
    if (node.kind != GroundNode::Kind::New) throw std::logic_error("extend_new on a non-New node");
    auto& cp = tree.choice_points.at(node.cp);
    int option = static_cast<int>(cp.options.size());
    cp.options.push_back({element});
    Builder b(domain, tree, opts);
    // copy: building may grow choice_points and invalidate `cp`
    ChoicePoint snapshot = tree.choice_points[node.cp];
    node.children.push_back(b.instance(snapshot, option, *node.body, node.env.with(node.var, element)));
    return option;
}

DomainElement allocate_fresh(const ChoicePoint& cp, std::int64_t counter, std::int64_t max_new) {
    if (cp.kind != ChoicePoint::Kind::New) throw std::logic_error("allocate_fresh on a non-New choice point");
    if (counter >= max_new)
        throw BudgetExceeded(BudgetExceeded::Kind::Creation,
                             "creation budget exceeded at " + cp.key() + " (max_new = " + std::to_string(max_new) + ")");
    return DomainElement::created(counter + 1, cp.occ);
}

// ---------------------------------------------------------------------------
// Flattening

std::string RuleHead::render() const { return kind == Kind::Atom ? atom.render() : "create " + element.render(); }

namespace {

void flatten_node(const GroundTree& tree, const GroundNode& n, Context& ctx, std::vector<GuardedRule>& out) {
    auto descend = [&](const GroundNode& child, std::optional<Commitment> commit) {
        if (commit) ctx.commitments.push_back(*commit);
        flatten_node(tree, child, ctx, out);
        if (commit) ctx.commitments.pop_back();
    };
    switch (n.kind) {
        case GroundNode::Kind::Atom:
            if (n.head) out.push_back({{RuleHead::Kind::Atom, *n.head, {}}, fo::conj_all(ctx.guard), ctx.needs, ctx.commitments, n.occ});
            break;
        case GroundNode::Kind::If: {
            ctx.guard.push_back(n.condition);
            std::size_t added = 0;
            for (const auto& e : n.needs)
                if (std::find(ctx.needs.begin(), ctx.needs.end(), e) == ctx.needs.end()) {
                    ctx.needs.push_back(e);
                    ++added;
                }
            for (const auto& c : n.children) descend(*c, std::nullopt);
            ctx.needs.resize(ctx.needs.size() - added);
            ctx.guard.pop_back();
            break;
        }
        case GroundNode::Kind::And:
            for (const auto& c : n.children) descend(*c, std::nullopt);
            break;
        case GroundNode::Kind::Or:
        case GroundNode::Kind::Select:
            for (std::size_t i = 0; i < n.children.size(); ++i)
                descend(*n.children[i], Commitment{n.cp, static_cast<int>(i)});
            break;
        case GroundNode::Kind::New: {
            const auto& cp = tree.choice_points[n.cp];
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                Commitment commit{n.cp, static_cast<int>(i)};
                auto commitments = ctx.commitments;
                commitments.push_back(commit);
                out.push_back({{RuleHead::Kind::Create, {}, cp.options[i][0]}, fo::conj_all(ctx.guard), ctx.needs,
                               std::move(commitments), n.occ});
                descend(*n.children[i], commit);
            }
            break;
        }
    }
}

}  // namespace

std::vector<GuardedRule> flatten(const GroundTree& tree) {
    std::vector<GuardedRule> out;
    Context ctx;
    for (const auto& r : tree.roots) flatten_node(tree, *r, ctx, out);
    return out;
}

// ---------------------------------------------------------------------------
// Object-creation elimination

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
    std::string name = base;
    while (taken.count(name)) name += "_";
    return name;
}

struct Eliminator {
    std::set<std::string> taken;  // predicate names
    std::vector<PredicateDecl> aux;
    std::vector<std::vector<std::string>> aux_vars;  // enclosing variables per N_i

    static void bind(std::vector<std::string>& scope, const std::vector<std::string>& vars) {
        for (const auto& v : vars) {
            scope.erase(std::remove(scope.begin(), scope.end(), v), scope.end());
            scope.push_back(v);
        }
    }

    Cee rewrite(const Cee& c, const std::vector<std::string>& scope) {
        return std::visit(
            [&](const auto& n) -> Cee {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Cee::Atom>) {
                    return cee::atom(n.pred, n.args);
                } else if constexpr (std::is_same_v<N, Cee::If>) {
                    return cee::if_then(n.condition, rewrite(*n.body, scope));
                } else if constexpr (std::is_same_v<N, Cee::And> || std::is_same_v<N, Cee::Or>) {
                    // left before right so N_i follow source order
                    Cee a = rewrite(*n.lhs, scope);
                    Cee b = rewrite(*n.rhs, scope);
                    if constexpr (std::is_same_v<N, Cee::And>)
                        return cee::cand(std::move(a), std::move(b));
                    else
                        return cee::cor(std::move(a), std::move(b));
                } else if constexpr (std::is_same_v<N, Cee::All> || std::is_same_v<N, Cee::Select>) {
                    auto inner = scope;
                    bind(inner, n.vars);
                    Cee body = rewrite(*n.body, inner);
                    if constexpr (std::is_same_v<N, Cee::All>)
                        return cee::all(n.vars, n.qual, std::move(body));
                    else
                        return cee::select(n.vars, n.qual, std::move(body));
                } else {
                    std::string name = fresh_name("N" + std::to_string(aux.size() + 1), taken);
                    taken.insert(name);
                    aux.push_back({name, static_cast<int>(1 + scope.size())});
                    aux_vars.push_back(scope);
                    std::vector<Term> args{Term::var(n.var)};
                    for (const auto& v : scope)
                        if (v != n.var) args.push_back(Term::var(v));
                    // the New variable shadows an enclosing one of the same name
                    if (std::find(scope.begin(), scope.end(), n.var) != scope.end()) {
                        aux.back().arity -= 1;
                        aux_vars.back().erase(std::find(aux_vars.back().begin(), aux_vars.back().end(), n.var));
                    }
                    auto inner = scope;
                    bind(inner, {n.var});
                    Cee body = rewrite(*n.body, inner);
                    return cee::select({n.var}, fo::truth(), cee::cand(cee::atom(name, std::move(args)), std::move(body)));
                }
            },
            c.node);
    }
};

std::vector<Term> vars_as_terms(const std::vector<std::string>& vs) {
    std::vector<Term> out;
    for (const auto& v : vs) out.push_back(Term::var(v));
    return out;
}

std::vector<std::string> renamed_vars(const std::vector<std::string>& vs, const std::string& suffix) {
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(v + suffix);
    return out;
}

Formula aux_atom(const std::string& pred, const std::string& x, const std::vector<std::string>& vs) {
    std::vector<Term> args{Term::var(x)};
    for (auto& t : vars_as_terms(vs)) args.push_back(std::move(t));
    return fo::atom(pred, std::move(args));
}

Formula quantify(std::vector<std::string> vars, Formula body) { return fo::forall(std::move(vars), std::move(body)); }

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

NewElimination eliminate_new(const Theory& t) {
    Eliminator el;
    for (const auto& p : t.vocabulary.predicates) el.taken.insert(p.name);

    std::vector<Cee> cees;
    for (const auto& c : t.cees) cees.push_back(el.rewrite(c, {}));
    if (el.aux.empty()) return {t, {}};

    Vocabulary voc = t.vocabulary;
    auto endo = endogenous_predicates(t);
    std::vector<PredicateDecl> exogenous;
    for (const auto& p : t.vocabulary.predicates)
        if (!endo.count(p.name)) exogenous.push_back(p);
    for (const auto& p : el.aux) voc.predicates.push_back(p);

    std::vector<Formula> sentences = t.sentences;
    for (std::size_t i = 0; i < el.aux.size(); ++i) {
        const auto& ni = el.aux[i].name;
        const auto& vi = el.aux_vars[i];
        std::set<std::string> used(vi.begin(), vi.end());
        std::string x = fresh_name("x", used);
        used.insert(x);
        std::string y = fresh_name("y", used);
        used.insert(y);
        auto vi2 = renamed_vars(vi, "_2");

        // disjointness with every later creator
        for (std::size_t j = i + 1; j < el.aux.size(); ++j) {
            auto vj = renamed_vars(el.aux_vars[j], "_3");
            sentences.push_back(quantify(concat(concat({x}, vi), vj),
                                         fo::neg(fo::conj(aux_atom(ni, x, vi), aux_atom(el.aux[j].name, x, vj)))));
        }
        // at most one element per instance
        sentences.push_back(
            quantify(concat({x, y}, vi), fo::implies(fo::conj(aux_atom(ni, x, vi), aux_atom(ni, y, vi)),
                                                     fo::atom("=", {Term::var(x), Term::var(y)}))));
        // at most one instance per element
        if (!vi.empty()) {
            std::vector<Formula> eqs;
            for (std::size_t k = 0; k < vi.size(); ++k)
                eqs.push_back(fo::atom("=", {Term::var(vi[k]), Term::var(vi2[k])}));
            sentences.push_back(quantify(concat(concat({x}, vi), vi2),
                                         fo::implies(fo::conj(aux_atom(ni, x, vi), aux_atom(ni, x, vi2)), fo::conj_all(eqs))));
        }
        // freshness: not an integer, not a constant, not mentioned by the exogenous input
        std::vector<Formula> fresh{fo::neg(fo::atom("=<", {Term::var(x), Term::var(x)}))};
        for (const auto& c : t.vocabulary.constants) fresh.push_back(fo::atom("~=", {Term::var(x), Term::constant(c)}));
        for (const auto& p : exogenous) {
            for (int pos = 0; pos < p.arity; ++pos) {
                std::vector<std::string> others;
                std::vector<Term> args;
                for (int k = 0; k < p.arity; ++k) {
                    if (k == pos) {
                        args.push_back(Term::var(x));
                    } else {
                        others.push_back(fresh_name("z" + std::to_string(k), used));
                        args.push_back(Term::var(others.back()));
                    }
                }
                Formula a = fo::atom(p.name, std::move(args));
                fresh.push_back(fo::neg(others.empty() ? a : fo::exists(others, a)));
            }
        }
        sentences.push_back(quantify(concat({x}, vi), fo::implies(aux_atom(ni, x, vi), fo::conj_all(fresh))));
    }

    NewElimination out{Theory::make(std::move(voc), std::move(cees), std::move(sentences)), {}};
    for (const auto& p : el.aux) out.aux_predicates.push_back(p.name);
    return out;
}

}  // namespace causalog
