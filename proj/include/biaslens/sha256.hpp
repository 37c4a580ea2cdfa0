#pragma once

// Minimal SHA-256 (FIPS 180-4) used for input digests in run manifests.
// Self-contained so the tool does not need a crypto library for checksums.

#include <cstdint>
#include <string>

namespace biaslens {

class Sha256 {
  public:
    Sha256();
    void update(const void* data, std::size_t len);
    // Finalizes and returns the lowercase hex digest. The object must not
    // be updated afterwards.
    std::string hex_digest();

  private:
    void process_block(const std::uint8_t* block);

    std::uint32_t h_[8];
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
    std::uint64_t total_len_ = 0;
};

std::string sha256_hex(const std::string& data);

// Streams the file through the hash; throws IoError if unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace biaslens
