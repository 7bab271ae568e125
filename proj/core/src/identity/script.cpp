#include <sstream>

#include "hqva/identity/script.hpp"

namespace hqva::dsl {

namespace {

std::string join_slots(const std::vector<int>& s) {
    std::string r;
    for (int v : s) r += std::to_string(v);
    return r;
}

std::string slot_set(const std::vector<int>& s) {
    std::string r = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) r += ",";
        r += std::to_string(s[i]);
    }
    return r + "}";
}

}  // namespace

std::string print_linear(const LinearForm& f) {
    std::string out;
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        const LinearTerm& t = f.terms[i];
        const bool negative = t.coeff < 0;
        if (i == 0) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        const Rational mag = negative ? Rational(-t.coeff) : t.coeff;
        std::vector<std::string> parts;
        if (mag != 1) parts.push_back(to_string(mag));
        if (t.symbol == LinearTerm::Symbol::Kappa) parts.emplace_back("kappa");
        if (t.symbol == LinearTerm::Symbol::Level) parts.emplace_back("c");
        parts.push_back(t.var);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            if (k > 0) out += "*";
            out += parts[k];
        }
    }
    return out;
}

std::string print_mult(const MultForm& f) {
    std::string out;
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
        const MultFactor& fac = f.factors[i];
        if (fac.name.empty()) {
            if (i > 0) out += "*";
            out += "exp(" + print_linear(fac.exponent) + ")";
        } else if (i > 0 && fac.power < 0) {
            out += "/" + fac.name;
            if (fac.power != -1) out += "^" + std::to_string(-fac.power);
        } else {
            if (i > 0) out += "*";
            out += fac.name;
            if (fac.power != 1) out += "^" + std::to_string(fac.power);
        }
    }
    return out;
}

std::string print_expr(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::One: return "1";
        case K::RHat: return "Rhat" + join_slots(e.slots) + "(" + print_linear(e.additive) + ")";
        case K::RTilde: return "Rtilde" + join_slots(e.slots) + "(" + print_mult(e.multiplicative) + ")";
        case K::M: return "M" + join_slots(e.slots);
        case K::MInv: return "Minv" + join_slots(e.slots);
        case K::P: return "P" + join_slots(e.slots);
        case K::ConjM: return "conjM" + join_slots(e.slots) + "(" + print_expr(*e.kids[0]) + ")";
        case K::ConjMInv: return "conjMinv" + join_slots(e.slots) + "(" + print_expr(*e.kids[0]) + ")";
        case K::Inverse: return "inv(" + print_expr(*e.kids[0]) + ")";
        case K::Transpose: {
            const Expr& k = *e.kids[0];
            std::string inner = print_expr(k);
            if (k.kind == K::Product) inner = "(" + inner + ")";
            return inner + "^{t" + std::to_string(e.slots[0]) + "}";
        }
        case K::Product: {
            std::string out;
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i > 0) out += " * ";
                const std::string s = print_expr(*e.kids[i]);
                out += e.kids[i]->kind == K::Product ? "(" + s + ")" : s;
            }
            return out;
        }
        case K::Odot:
            return std::string(e.mode == OdotMode::LR ? "odot_LR(" : "odot_RL(") + print_expr(*e.kids[0]) + ", " +
                   print_expr(*e.kids[1]) + ", " + slot_set(e.left) + ", " + slot_set(e.right) + ")";
        case K::Prefactor: {
            std::string out = "(" + print_mult(e.prefactor_left) + " - " + print_mult(e.prefactor_right) + ")";
            if (e.power != 1) out += "^" + std::to_string(e.power);
            return out;
        }
    }
    return "";
}

std::string print_script(const IdentityScript& s) {
    std::ostringstream out;
    const Declarations& d = s.decls;
    if (d.family) out << "family " << family_letter(*d.family) << "\n";
    if (d.rank) out << "rank " << *d.rank << "\n";
    if (d.order) out << "order " << *d.order << "\n";
    if (d.level) out << "level " << to_string(*d.level) << "\n";
    if (d.slots) out << "slots " << *d.slots << "\n";
    auto list = [&](const char* kw, const std::vector<std::string>& names) {
        if (names.empty()) return;
        out << kw << " ";
        for (std::size_t i = 0; i < names.size(); ++i) out << (i > 0 ? ", " : "") << names[i];
        out << "\n";
    };
    list("spectral", d.spectral);
    list("multiplicative", d.multiplicative);
    if (!d.capped.empty()) {
        out << "capped ";
        for (std::size_t i = 0; i < d.capped.size(); ++i) {
            out << (i > 0 ? ", " : "") << d.capped[i].first << "=" << d.capped[i].second;
        }
        out << "\n";
    }
    out << print_expr(*s.lhs) << " == " << print_expr(*s.rhs) << "\n";
    return out.str();
}

bool same_expr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.slots != b.slots || !(a.additive == b.additive) ||
        !(a.multiplicative == b.multiplicative) || !(a.prefactor_left == b.prefactor_left) ||
        !(a.prefactor_right == b.prefactor_right) || a.power != b.power || a.left != b.left || a.right != b.right ||
        a.mode != b.mode || a.kids.size() != b.kids.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i) {
        if (!same_expr(*a.kids[i], *b.kids[i])) return false;
    }
    return true;
}

bool same_script(const IdentityScript& a, const IdentityScript& b) {
    return a.decls == b.decls && a.slot_count == b.slot_count && same_expr(*a.lhs, *b.lhs) &&
           same_expr(*a.rhs, *b.rhs);
}

}  // namespace hqva::dsl
