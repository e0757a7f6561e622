#pragma once

// The five-way attack taxonomy. Raw corpus labels map onto four attack
// categories plus normal traffic; anything outside the mapping is UNKNOWN
// (a value, not an error) so odd labels can never abort an evaluation.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace kdd {

enum class Category : std::int8_t {
    Dos = 0,
    U2r = 1,
    R2l = 2,
    Probe = 3,
    Normal = 4,
    Unknown = -1,
};

inline constexpr std::size_t kCategoryCount = 5;

inline constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "DOS", "U2R", "R2L", "PROBE", "NORMAL"};

std::string_view to_string(Category c);

class AttackTaxonomy {
public:
    // The default mapping: 21 attack labels plus `normal`.
    static AttackTaxonomy standard();

    Category categorize(std::string_view raw_label) const;
    const std::map<std::string, Category, std::less<>>& mapping() const { return mapping_; }

private:
    std::map<std::string, Category, std::less<>> mapping_;
};

}  // namespace kdd
