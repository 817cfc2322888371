#pragma once

#include <cmath>
#include <complex>

namespace trap {

/// Neumaier's variant of Kahan summation.
template <class T>
class CompensatedSum {
public:
    CompensatedSum& operator+=(T v) noexcept {
        const T t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        return *this;
    }
    T value() const noexcept { return sum_ + comp_; }

private:
    T sum_{0};
    T comp_{0};
};

template <class T>
class CompensatedSum<std::complex<T>> {
public:
    CompensatedSum& operator+=(std::complex<T> v) noexcept {
        re_ += v.real();
        im_ += v.imag();
        return *this;
    }
    std::complex<T> value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum<T> re_;
    CompensatedSum<T> im_;
};

}  // namespace trap
