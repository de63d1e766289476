#include "evpanel/types.hpp"

namespace evpanel {

namespace {

constexpr std::array<std::string_view, kPolicyCount> kPolicyNames = {
    "travel_controls",  "transport_closure", "events_cancellation", "gatherings_restrictions",
    "school_closure",   "workplace_closure", "stay_at_home",        "internal_movement",
};

constexpr std::array<std::string_view, kMobilityCategoryCount> kCategoryNames = {
    "retail_recreation", "grocery_pharmacy", "parks", "transit_stations", "workplaces", "residential",
};

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "Europe", "Asia", "MiddleEast", "NorthAmerica", "SouthAmerica", "Oceania", "Africa",
};

} // namespace

std::string_view policy_name(PolicyKind p) {
    return kPolicyNames[static_cast<std::size_t>(p)];
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
    for (std::size_t i = 0; i < kPolicyNames.size(); ++i)
        if (kPolicyNames[i] == name)
            return static_cast<PolicyKind>(i);
    return std::nullopt;
}

std::string_view mobility_category_name(MobilityCategory c) {
    return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<MobilityCategory> parse_mobility_category(std::string_view name) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
        if (kCategoryNames[i] == name)
            return static_cast<MobilityCategory>(i);
    return std::nullopt;
}

std::string_view region_name(Region r) {
    return kRegionNames[static_cast<std::size_t>(r)];
}

std::optional<Region> parse_region(std::string_view name) {
    for (std::size_t i = 0; i < kRegionNames.size(); ++i)
        if (kRegionNames[i] == name)
            return static_cast<Region>(i);
    return std::nullopt;
}

bool valid_country_code(std::string_view code) {
    if (code.size() != 3)
        return false;
    for (char c : code)
        if (c < 'A' || c > 'Z')
            return false;
    return true;
}

} // namespace evpanel
