/* Harness shim interface for native leak-demonstration targets.
 *
 * A target translation unit implements hf_target_run() and links against
 * harness.c, which provides the process entry point: it reads one
 * length-prefixed input from stdin, derives the secret-seeded fill pattern,
 * poisons the stack, and invokes the target.  Output written through
 * hf_write_output() goes to stdout; the process exits 0 on any decodable
 * input (decoding is total, so that is every input).
 */

#ifndef HF_HARNESS_H
#define HF_HARNESS_H

#include <stddef.h>
#include <stdint.h>

/* Saturating 8-bit edge counter in the shared coverage map (no-op when the
 * fuzzer did not provide a map). */
void hf_edge(uint16_t id);

/* Allocate size bytes of fresh memory plus a 64-byte redzone, all filled
 * with the poison pattern (or zero pages when filling is disabled).
 * Returns NULL on allocation failure. */
void *hf_malloc(size_t size);

/* Write target output to stdout; best effort, never aborts the process. */
void hf_write_output(const void *data, size_t len);

/* 8-byte poison pattern for the current input; all zeros when disabled. */
extern uint8_t hf_fill_pattern[8];

/* 1 unless HYPERFUZZ_NO_FILL=1 was set by the fuzzer. */
extern int hf_fill_enabled;

/* Implemented by each target: consume the decoded input parts, report
 * edges, write public output. */
void hf_target_run(const uint8_t *pub, size_t pub_len,
                   const uint8_t *sec, size_t sec_len);

#endif /* HF_HARNESS_H */
