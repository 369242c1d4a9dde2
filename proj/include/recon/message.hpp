#ifndef RECON_MESSAGE_HPP
#define RECON_MESSAGE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "recon/bits.hpp"

namespace recon {

enum class Role : std::uint8_t { Alice, Bob };

enum class MsgTag : std::uint8_t {
    Syndrome = 0x01,
    Disclose = 0x02,
    HashBlock = 0x03,
    Ack = 0x04,
    Nack = 0x05,
    HashSubblocks = 0x06,
    BadIndices = 0x07,
};

// One protocol frame. The payload is kept packed (MSB-first bit strings,
// zero-padded to the octet boundary); bit counts follow from tag and config.
struct ProtocolMessage {
    MsgTag tag;
    std::optional<std::uint16_t> sub_block_id;  // 0xFFFF on the wire when absent
    std::vector<std::uint8_t> payload;

    bool operator==(const ProtocolMessage&) const = default;
};

// Frame layout: [1 octet tag][4 octets BE payload length]
// [2 octets BE sub_block_id, 0xFFFF when absent][payload].
std::vector<std::uint8_t> encode_message(const ProtocolMessage& msg);
ProtocolMessage decode_message(std::span<const std::uint8_t> octets);

}  // namespace recon

#endif
