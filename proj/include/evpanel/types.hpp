#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace evpanel {

/// The eight intervention types, in stable reporting order.
enum class PolicyKind : int {
    TravelControls = 0,
    TransportClosure,
    EventsCancellation,
    GatheringsRestrictions,
    SchoolClosure,
    WorkplaceClosure,
    StayAtHome,
    InternalMovement,
};

inline constexpr int kPolicyCount = 8;

inline constexpr std::array<PolicyKind, kPolicyCount> kAllPolicies = {
    PolicyKind::TravelControls,      PolicyKind::TransportClosure,
    PolicyKind::EventsCancellation,  PolicyKind::GatheringsRestrictions,
    PolicyKind::SchoolClosure,       PolicyKind::WorkplaceClosure,
    PolicyKind::StayAtHome,          PolicyKind::InternalMovement,
};

std::string_view policy_name(PolicyKind p);
std::optional<PolicyKind> parse_policy(std::string_view name);

/// Google mobility place categories.
enum class MobilityCategory : int {
    RetailRecreation = 0,
    GroceryPharmacy,
    Parks,
    TransitStations,
    Workplaces,
    Residential,
};

inline constexpr int kMobilityCategoryCount = 6;

inline constexpr std::array<MobilityCategory, kMobilityCategoryCount> kAllMobilityCategories = {
    MobilityCategory::RetailRecreation, MobilityCategory::GroceryPharmacy,
    MobilityCategory::Parks,            MobilityCategory::TransitStations,
    MobilityCategory::Workplaces,       MobilityCategory::Residential,
};

std::string_view mobility_category_name(MobilityCategory c);
std::optional<MobilityCategory> parse_mobility_category(std::string_view name);

enum class Region : int {
    Europe = 0,
    Asia,
    MiddleEast,
    NorthAmerica,
    SouthAmerica,
    Oceania,
    Africa,
};

inline constexpr int kRegionCount = 7;

std::string_view region_name(Region r);
std::optional<Region> parse_region(std::string_view name);

/// Policy intensity levels are integers on the 0-6 scale; 0 means inactive.
inline constexpr int kMaxIntensity = 6;

inline bool valid_intensity(int level) {
    return level >= 0 && level <= kMaxIntensity;
}

/// Canonical country keys are ISO-3166 alpha-3 shaped: three uppercase letters.
bool valid_country_code(std::string_view code);

} // namespace evpanel
