#pragma once

// Global variable registry. Append-only; ids fix the monomial order, so a block
// of common names is registered up front in a fixed order.

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace qrt {

using Var = std::uint32_t;

class Registry {
public:
    Var id(const std::string& name) {
        std::lock_guard<std::mutex> lk(m_);
        auto it = ids_.find(name);
        if (it != ids_.end()) return it->second;
        Var v = static_cast<Var>(names_.size());
        names_.push_back(name);
        ids_.emplace(name, v);
        return v;
    }
    std::string name(Var v) const {
        std::lock_guard<std::mutex> lk(m_);
        return names_.at(v);
    }
    bool known(const std::string& name) const {
        std::lock_guard<std::mutex> lk(m_);
        return ids_.count(name) != 0;
    }

    static Registry& instance() {
        static Registry r = [] {
            Registry g;
            for (const char* b : {"x", "y", "X", "Y", "z"})
                for (int s = 6; s >= -6; --s) g.id(indexed(b, s));
            return g;
        }();
        return r;
    }

    static std::string indexed(const std::string& base, int shift) {
        if (shift == 0) return base + "[n]";
        return base + (shift > 0 ? "[n+" : "[n-") + std::to_string(shift > 0 ? shift : -shift) + "]";
    }

    Registry() = default;
    Registry(Registry&& o) noexcept : names_(std::move(o.names_)), ids_(std::move(o.ids_)) {}

private:
    mutable std::mutex m_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, Var> ids_;
};

inline Var var(const std::string& name) { return Registry::instance().id(name); }
inline std::string var_name(Var v) { return Registry::instance().name(v); }
inline Var ivar(const std::string& base, int shift) { return var(Registry::indexed(base, shift)); }

struct IndexedName {
    std::string base;
    int shift = 0;
    bool indexed = false;
};

// "x[n+1]" -> {x, 1, true}; "A" -> {A, 0, false}
inline IndexedName split_index(const std::string& name) {
    auto lb = name.find('[');
    if (lb == std::string::npos || name.back() != ']') return {name, 0, false};
    std::string base = name.substr(0, lb), in = name.substr(lb + 1, name.size() - lb - 2);
    if (in.empty() || in[0] != 'n') return {name, 0, false};
    int s = 0;
    if (in.size() > 1) s = std::stoi(in.substr(in[1] == '+' ? 2 : 1));
    return {base, s, true};
}

// x[n] -> x[n+k]; plain names are index-free and map to themselves.
inline Var shifted(Var v, int k) {
    if (k == 0) return v;
    auto in = split_index(var_name(v));
    if (!in.indexed) return v;
    return ivar(in.base, in.shift + k);
}

}  // namespace qrt
