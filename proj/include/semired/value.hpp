#pragma once

#include <optional>
#include <stdexcept>

#include "semired/rational.hpp"

namespace semired {

// Element of Q ∪ {∞}: the codomain of a valuation. Infinity absorbs addition
// and dominates every comparison.
class Value {
  public:
    Value() : inf_(true) {}
    Value(const Rat& q) : inf_(false), q_(q) {}  // NOLINT: implicit by design
    Value(long n) : inf_(false), q_(n) {}        // NOLINT

    static Value infinity() { return Value(); }

    bool is_infinite() const { return inf_; }
    const Rat& finite() const {
        if (inf_) throw std::domain_error("Value is infinite");
        return q_;
    }

    Value operator+(const Value& o) const {
        if (inf_ || o.inf_) return infinity();
        return Value(q_ + o.q_);
    }
    Value operator*(long n) const {
        if (inf_) return infinity();
        return Value(q_ * n);
    }
    friend Value min(const Value& a, const Value& b) {
        if (a.inf_) return b;
        if (b.inf_) return a;
        return a.q_ <= b.q_ ? a : b;
    }
    bool operator==(const Value& o) const {
        if (inf_ != o.inf_) return false;
        return inf_ || q_ == o.q_;
    }
    bool operator!=(const Value& o) const { return !(*this == o); }
    bool operator<(const Value& o) const {
        if (inf_) return false;
        if (o.inf_) return true;
        return q_ < o.q_;
    }
    bool operator<=(const Value& o) const { return *this < o || *this == o; }
    bool operator>(const Value& o) const { return o < *this; }
    bool operator>=(const Value& o) const { return o <= *this; }

    std::string str() const { return inf_ ? "inf" : rat_str(q_); }

  private:
    bool inf_;
    Rat q_;
};

}  // namespace semired
