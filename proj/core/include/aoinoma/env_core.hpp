#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aoinoma/common.hpp"

// Per-UE packet generation, buffering and Age-of-Information bookkeeping.
namespace aoinoma::env {

struct InfoConfig {
    int types = 3;
    std::vector<double> packet_bits{1000.0, 1000.0, 1000.0};
    double buffer_bits = 4000.0;
    double slot_s = 0.01;
    /// AoI saturation in slots; stands in for the infinite age before the
    /// first reception.
    int theta_cap_slots = 1000;

    void validate() const;
    double max_aoi_s() const { return theta_cap_slots * slot_s; }
};

/// Raised when a buffer holds more bits than its capacity.
class BufferOverflow : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

/// Raised when a ratio is requested over an empty window.
class UndefinedRatio : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct UeState {
    Bits updates;   ///< x: admitted updates of the current slot
    Bits buffered;  ///< z: buffer occupancy after the last scheduling decision
    double free_bits = 0.0;
    std::vector<double> aoi_s;
    /// Slot at which the packet currently buffered for each type was generated.
    std::vector<std::optional<long>> gen_slot;

    static UeState initial(const InfoConfig& cfg);
};

/// Uniform draw over the power set of the F types.
Bits generate_updates(Rng& rng, int types);

/// Drops new updates (lowest type index first) until the buffer can hold every
/// packet that would be present before transmission. Re-generated types replace
/// their buffered copy and never need extra space.
Bits admit_updates(std::span<const std::uint8_t> buffered, std::span<const std::uint8_t> updates,
                   std::span<const double> packet_bits, double buffer_bits);

/// z = (z_prev OR x) XOR phi. Throws ContractViolation if phi sends a packet
/// that is neither buffered nor freshly generated.
Bits apply_buffer_update(std::span<const std::uint8_t> buffered, std::span<const std::uint8_t> updates,
                         std::span<const std::uint8_t> phi);

double free_buffer_space(std::span<const std::uint8_t> buffered, std::span<const double> packet_bits,
                         double buffer_bits);

bool check_transmission_feasible(std::span<const std::uint8_t> buffered, std::span<const std::uint8_t> updates,
                                 std::span<const std::uint8_t> phi);

/// AoI evolution for slot `slot`. Transmitting a fresh packet resets the age
/// to one slot; transmitting a buffered one resets it to the slots elapsed
/// since that packet's generation (inclusive); otherwise the age grows by one
/// slot up to the cap. Also stamps gen_slot for packets entering the buffer.
void update_aoi(UeState& ue, std::span<const std::uint8_t> phi, std::span<const std::uint8_t> updates, long slot,
                const InfoConfig& cfg);

/// Applies one scheduling decision: AoI, buffer flags and free space.
void advance(UeState& ue, std::span<const std::uint8_t> phi, long slot, const InfoConfig& cfg);

double average_aoi(std::span<const UeState> ues);
double average_aoi(std::span<const double> aoi_s);

struct PacketCounters {
    long generated = 0;
    long transmitted = 0;

    /// transmitted / generated; throws UndefinedRatio when nothing was generated.
    double transmitted_ratio() const;
    double dropped_ratio() const { return 1.0 - transmitted_ratio(); }

    PacketCounters& operator+=(const PacketCounters& other)
    {
        generated += other.generated;
        transmitted += other.transmitted;
        return *this;
    }
};

}  // namespace aoinoma::env
