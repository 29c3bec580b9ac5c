#include "aoinoma/env_core.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aoinoma::env {

void InfoConfig::validate() const
{
    if (types < 1) {
        throw std::invalid_argument("info_types must be >= 1");
    }
    if (static_cast<int>(packet_bits.size()) != types) {
        throw std::invalid_argument("packet_bits must list one size per information type");
    }
    for (double b : packet_bits) {
        if (!(b > 0.0)) {
            throw std::invalid_argument("packet_bits must be positive");
        }
    }
    if (buffer_bits < *std::max_element(packet_bits.begin(), packet_bits.end())) {
        throw std::invalid_argument("buffer_bits must hold the largest packet");
    }
    if (!(slot_s > 0.0)) {
        throw std::invalid_argument("slot_s must be positive");
    }
    if (theta_cap_slots < 1) {
        throw std::invalid_argument("theta_cap must be >= 1");
    }
}

UeState UeState::initial(const InfoConfig& cfg)
{
    UeState ue;
    ue.updates.assign(cfg.types, 0);
    ue.buffered.assign(cfg.types, 0);
    ue.free_bits = cfg.buffer_bits;
    ue.aoi_s.assign(cfg.types, cfg.max_aoi_s());
    ue.gen_slot.assign(cfg.types, std::nullopt);
    return ue;
}

Bits generate_updates(Rng& rng, int types)
{
    // One uniform subset index; every subset has probability 2^-F.
    const auto subset = std::uniform_int_distribution<std::uint64_t>(0, (std::uint64_t{1} << types) - 1)(rng);
    Bits x(types);
    for (int f = 0; f < types; ++f) {
        x[f] = static_cast<std::uint8_t>((subset >> f) & 1u);
    }
    return x;
}

Bits admit_updates(std::span<const std::uint8_t> buffered, std::span<const std::uint8_t> updates,
                   std::span<const double> packet_bits, double buffer_bits)
{
    Bits admitted(updates.begin(), updates.end());
    auto occupied = [&] {
        double bits = 0.0;
        for (std::size_t f = 0; f < admitted.size(); ++f) {
            bits += (buffered[f] | admitted[f]) * packet_bits[f];
        }
        return bits;
    };
    for (std::size_t f = 0; f < admitted.size() && occupied() > buffer_bits; ++f) {
        if (admitted[f] && !buffered[f]) {
            admitted[f] = 0;
        }
    }
    if (occupied() > buffer_bits) {
        throw BufferOverflow("buffered packets already exceed the buffer capacity");
    }
    return admitted;
}

bool check_transmission_feasible(std::span<const std::uint8_t> buffered, std::span<const std::uint8_t> updates,
                                 std::span<const std::uint8_t> phi)
{
    for (std::size_t f = 0; f < phi.size(); ++f) {
        if (phi[f] > (buffered[f] | updates[f])) {
            return false;
        }
    }
    return true;
}

Bits apply_buffer_update(std::span<const std::uint8_t> buffered, std::span<const std::uint8_t> updates,
                         std::span<const std::uint8_t> phi)
{
    expects(buffered.size() == updates.size() && updates.size() == phi.size(), "buffer update: length mismatch");
    expects(check_transmission_feasible(buffered, updates, phi), "buffer update: transmitting a packet that does not exist");
    Bits z(phi.size());
    for (std::size_t f = 0; f < phi.size(); ++f) {
        z[f] = static_cast<std::uint8_t>((buffered[f] | updates[f]) ^ phi[f]);
    }
    return z;
}

double free_buffer_space(std::span<const std::uint8_t> buffered, std::span<const double> packet_bits,
                         double buffer_bits)
{
    double free = buffer_bits;
    for (std::size_t f = 0; f < buffered.size(); ++f) {
        free -= buffered[f] * packet_bits[f];
    }
    if (free < 0.0) {
        throw BufferOverflow("buffer holds " + std::to_string(buffer_bits - free) + " bits, capacity " +
                             std::to_string(buffer_bits));
    }
    return free;
}

void update_aoi(UeState& ue, std::span<const std::uint8_t> phi, std::span<const std::uint8_t> updates, long slot,
                const InfoConfig& cfg)
{
    expects(check_transmission_feasible(ue.buffered, updates, phi), "AoI update: infeasible transmission");
    const double cap = cfg.max_aoi_s();
    for (int f = 0; f < cfg.types; ++f) {
        if (phi[f] && updates[f]) {
            ue.aoi_s[f] = cfg.slot_s;
            ue.gen_slot[f].reset();
        } else if (phi[f]) {
            expects(ue.gen_slot[f].has_value(), "AoI update: buffered packet without a generation stamp");
            ue.aoi_s[f] = static_cast<double>(slot - *ue.gen_slot[f] + 1) * cfg.slot_s;
            ue.gen_slot[f].reset();
        } else {
            ue.aoi_s[f] = std::min(ue.aoi_s[f] + cfg.slot_s, cap);
            if (updates[f]) {
                ue.gen_slot[f] = slot;
            }
        }
    }
}

void advance(UeState& ue, std::span<const std::uint8_t> phi, long slot, const InfoConfig& cfg)
{
    Bits next = apply_buffer_update(ue.buffered, ue.updates, phi);
    update_aoi(ue, phi, ue.updates, slot, cfg);
    ue.buffered = std::move(next);
    ue.free_bits = free_buffer_space(ue.buffered, cfg.packet_bits, cfg.buffer_bits);
}

double average_aoi(std::span<const double> aoi_s)
{
    if (aoi_s.empty()) {
        return 0.0;
    }
    return std::accumulate(aoi_s.begin(), aoi_s.end(), 0.0) / static_cast<double>(aoi_s.size());
}

double average_aoi(std::span<const UeState> ues)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& ue : ues) {
        sum = std::accumulate(ue.aoi_s.begin(), ue.aoi_s.end(), sum);
        count += ue.aoi_s.size();
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double PacketCounters::transmitted_ratio() const
{
    if (generated <= 0) {
        throw UndefinedRatio("transmitted ratio over a window with no generated packets");
    }
    return static_cast<double>(transmitted) / static_cast<double>(generated);
}

}  // namespace aoinoma::env
