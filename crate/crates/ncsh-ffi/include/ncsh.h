#ifndef NCSH_H
#define NCSH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum {
  NCSH_STATUS_OK = 0,
  NCSH_STATUS_NULL_ARGUMENT = 1,
  NCSH_STATUS_INVALID_ARGUMENT = 2,
  NCSH_STATUS_CRYPTO_FAILURE = 3,
  NCSH_STATUS_VERIFICATION_FAILED = 4,
  NCSH_STATUS_IO_FAILURE = 5,
  NCSH_STATUS_MALFORMED = 6,
} NcshStatus;

/**
 * Opaque RSA key pair handle.
 */
typedef struct NcshKeyPair NcshKeyPair;

/**
 * Heap buffer owned by the library; release with `ncsh_buffer_free`.
 */
typedef struct {
  uint8_t *data;
  uintptr_t len;
} NcshBuffer;

/**
 * Calibration result for one security level and cipher suite.
 */
typedef struct {
  uint8_t suite;
  uint8_t sig_mode;
  uint64_t rsa_modulus_bits;
  uintptr_t sym_key_octets;
} NcshSuiteParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Human-readable description of a status code. The returned string is
 * static; do not free it.
 */
const char *ncsh_status_message(NcshStatus status);

/**
 * Releases a buffer returned by this library. A zeroed buffer is a no-op.
 */
void ncsh_buffer_free(NcshBuffer buf);

/**
 * Generates an RSA key pair at security level 1, 2 or 3 (512, 1024 or
 * 2048 modulus bits). `seed` makes generation reproducible; distinct
 * seeds yield independent keys.
 */
NcshStatus ncsh_keygen(uint8_t level, uint64_t seed, NcshKeyPair **out);

void ncsh_keypair_free(NcshKeyPair *keys);

/**
 * Writes `<prefix>.pub` and `<prefix>.key` for the pair.
 */
NcshStatus ncsh_keypair_write(const NcshKeyPair *keys, const char *prefix);

/**
 * Loads a key pair from a `.key` private key file.
 */
NcshStatus ncsh_keypair_read(const char *path, NcshKeyPair **out);

/**
 * SHA-1 of `data` into a caller-provided 20-octet buffer.
 */
NcshStatus ncsh_sha1(const uint8_t *data, uintptr_t len, uint8_t *digest_out);

/**
 * One AES-128 block encryption: 16-octet key, 16-octet input and output.
 */
NcshStatus ncsh_aes128_encrypt_block(const uint8_t *key, const uint8_t *input, uint8_t *output);

/**
 * One AES-128 block decryption: 16-octet key, 16-octet input and output.
 */
NcshStatus ncsh_aes128_decrypt_block(const uint8_t *key, const uint8_t *input, uint8_t *output);

/**
 * Fills `params` with the calibration for `level` (1..=3) and `suite`
 * (1 AES, 2 DES, 3 RSA).
 */
NcshStatus ncsh_calibrate(uint8_t level, uint8_t suite, NcshSuiteParams *params);

/**
 * Seals `plaintext` from `sender` to `recipient` in one shot: signs,
 * wraps the session key, encrypts, and serializes the envelope to its
 * wire form. `suite` is 1 AES, 2 DES, 3 RSA; `seed` drives the IV and
 * session key. The security level is the sender's key level.
 */
NcshStatus ncsh_seal(const NcshKeyPair *sender,
                     const NcshKeyPair *recipient,
                     uint8_t suite,
                     uint64_t seed,
                     const uint8_t *plaintext,
                     uintptr_t plaintext_len,
                     NcshBuffer *out);

/**
 * Opens a serialized envelope addressed to `recipient`: verifies the
 * signature first, then unwraps and decrypts. On success `out` holds the
 * plaintext.
 */
NcshStatus ncsh_open(const NcshKeyPair *recipient,
                     const uint8_t *envelope,
                     uintptr_t envelope_len,
                     NcshBuffer *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCSH_H */
