#pragma once

#include <string>

#include "cfmcast/netsim.hpp"

namespace cfmcast {

/// JSON document with positions, gains in dB and noise in dBm.
std::string realization_json(const NetworkRealization& net);

/// Binary sidecar of channel vectors: little-endian interleaved re/im
/// doubles, row-major [ue][ap][antenna].
void write_channel_sidecar(const NetworkRealization& net,
                           const std::string& path);
std::vector<std::vector<VecC>> read_channel_sidecar(const std::string& path,
                                                    int num_ues, int num_aps,
                                                    int num_antennas);

}  // namespace cfmcast
