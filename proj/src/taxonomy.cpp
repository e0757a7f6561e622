#include "kddbench/taxonomy.hpp"

namespace kdd {

std::string_view to_string(Category c) {
    if (c == Category::Unknown) return "UNKNOWN";
    return kCategoryNames[static_cast<std::size_t>(c)];
}

AttackTaxonomy AttackTaxonomy::standard() {
    AttackTaxonomy t;
    auto put = [&t](std::string_view label, Category c) { t.mapping_.emplace(label, c); };
    for (std::string_view l : {"smurf", "neptune", "back", "pod", "teardrop"}) put(l, Category::Dos);
    for (std::string_view l : {"buffer_overflow", "loadmodule", "perl", "rootkit"}) put(l, Category::U2r);
    for (std::string_view l : {"ftp_write", "guess_passwd", "imap", "multihop", "phf", "spy",
                               "warezclient", "warezmaster"})
        put(l, Category::R2l);
    for (std::string_view l : {"ipsweep", "nmap", "portsweep", "satan"}) put(l, Category::Probe);
    put("normal", Category::Normal);
    return t;
}

Category AttackTaxonomy::categorize(std::string_view raw_label) const {
    auto it = mapping_.find(raw_label);
    return it == mapping_.end() ? Category::Unknown : it->second;
}

}  // namespace kdd
