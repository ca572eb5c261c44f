#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdtsp {

// Minimal arbitrary-precision unsigned integer. Only the operations needed
// for tour counting are provided: multiply by a machine word, halve, compare
// and print. Stored little-endian in base 2^32.
class BigUint {
public:
    BigUint() : limbs_{0} {}
    explicit BigUint(std::uint64_t v) {
        limbs_.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
        trim();
    }

    BigUint& operator*=(std::uint32_t m) {
        std::uint64_t carry = 0;
        for (auto& limb : limbs_) {
            std::uint64_t cur = static_cast<std::uint64_t>(limb) * m + carry;
            limb = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
        }
        while (carry != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(carry & 0xffffffffu));
            carry >>= 32;
        }
        return *this;
    }

    // Exact division by two; the stored value must be even when callers rely
    // on exactness (it always is for (2n)!/2^k, k <= n).
    BigUint& halve() {
        std::uint32_t rem = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            std::uint64_t cur = (static_cast<std::uint64_t>(rem) << 32) | limbs_[i];
            limbs_[i] = static_cast<std::uint32_t>(cur >> 1);
            rem = static_cast<std::uint32_t>(cur & 1);
        }
        trim();
        return *this;
    }

    bool operator==(const BigUint& other) const { return limbs_ == other.limbs_; }
    bool operator!=(const BigUint& other) const { return !(*this == other); }

    bool fits_u64() const { return limbs_.size() <= 2; }
    std::uint64_t as_u64() const {
        std::uint64_t v = limbs_[0];
        if (limbs_.size() > 1) v |= static_cast<std::uint64_t>(limbs_[1]) << 32;
        return v;
    }

    std::string to_string() const {
        std::vector<std::uint32_t> work = limbs_;
        std::string digits;
        while (!(work.size() == 1 && work[0] == 0)) {
            std::uint64_t rem = 0;
            for (std::size_t i = work.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<std::uint32_t>(cur / 10);
                rem = cur % 10;
            }
            digits.push_back(static_cast<char>('0' + rem));
            while (work.size() > 1 && work.back() == 0) work.pop_back();
        }
        if (digits.empty()) digits.push_back('0');
        return std::string(digits.rbegin(), digits.rend());
    }

private:
    void trim() {
        while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
    }

    std::vector<std::uint32_t> limbs_;
};

}  // namespace pdtsp
