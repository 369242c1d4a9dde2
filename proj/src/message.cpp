#include "recon/message.hpp"

namespace recon {

namespace {

bool valid_tag(std::uint8_t t) {
    return t >= static_cast<std::uint8_t>(MsgTag::Syndrome) &&
           t <= static_cast<std::uint8_t>(MsgTag::BadIndices);
}

}  // namespace

std::vector<std::uint8_t> encode_message(const ProtocolMessage& msg) {
    if (!valid_tag(static_cast<std::uint8_t>(msg.tag)))
        throw std::invalid_argument("encode_message: unknown tag");
    if (msg.sub_block_id && *msg.sub_block_id == 0xFFFF)
        throw std::invalid_argument("encode_message: sub_block_id 0xFFFF is reserved");

    std::vector<std::uint8_t> out;
    out.reserve(7 + msg.payload.size());
    out.push_back(static_cast<std::uint8_t>(msg.tag));
    const std::uint32_t len = static_cast<std::uint32_t>(msg.payload.size());
    out.push_back(static_cast<std::uint8_t>(len >> 24));
    out.push_back(static_cast<std::uint8_t>(len >> 16));
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len));
    const std::uint16_t id = msg.sub_block_id.value_or(0xFFFF);
    out.push_back(static_cast<std::uint8_t>(id >> 8));
    out.push_back(static_cast<std::uint8_t>(id));
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

ProtocolMessage decode_message(std::span<const std::uint8_t> octets) {
    if (octets.size() < 7) throw parse_error("decode_message: truncated frame header");
    if (!valid_tag(octets[0])) throw parse_error("decode_message: unknown tag");
    const std::uint32_t len = (static_cast<std::uint32_t>(octets[1]) << 24) |
                              (static_cast<std::uint32_t>(octets[2]) << 16) |
                              (static_cast<std::uint32_t>(octets[3]) << 8) |
                              static_cast<std::uint32_t>(octets[4]);
    if (octets.size() != 7 + static_cast<std::size_t>(len))
        throw parse_error("decode_message: payload length mismatch");
    const std::uint16_t id =
        static_cast<std::uint16_t>((static_cast<std::uint16_t>(octets[5]) << 8) | octets[6]);

    ProtocolMessage msg;
    msg.tag = static_cast<MsgTag>(octets[0]);
    if (id != 0xFFFF) msg.sub_block_id = id;
    msg.payload.assign(octets.begin() + 7, octets.end());
    return msg;
}

}  // namespace recon
