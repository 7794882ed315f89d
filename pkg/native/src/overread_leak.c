/* Buffer over-read information leak.
 *
 * The caller controls a response length L = public[0] but the heap buffer
 * only holds min(len(public) - 1, 16) payload bytes; the target trusts L and
 * writes L bytes starting at the buffer, exposing allocator fill past the
 * payload.  L is clamped to 64 so the read stays inside the allocation's
 * 64-byte redzone: stale-byte semantics without undefined behavior.
 */

#include <string.h>

#include "harness.h"

#define BUFFER_SIZE 16u
#define MAX_READ 64u

void hf_target_run(const uint8_t *pub, size_t pub_len,
                   const uint8_t *sec, size_t sec_len)
{
    (void)sec;
    (void)sec_len;
    hf_edge(1);

    size_t length = pub_len > 0 ? pub[0] : 0;
    if (length > MAX_READ)
        length = MAX_READ;

    uint8_t *buffer = hf_malloc(BUFFER_SIZE);
    if (buffer == NULL)
        return;

    size_t payload_len = pub_len > 1 ? pub_len - 1 : 0;
    if (payload_len > BUFFER_SIZE)
        payload_len = BUFFER_SIZE;
    if (payload_len > 0)
        memcpy(buffer, pub + 1, payload_len);

    if (length > 0)
        hf_edge(2);
    else
        hf_edge(3);
    if (payload_len > 0)
        hf_edge(4);
    if (length > payload_len)
        hf_edge(5); /* the over-read branch */

    hf_write_output(buffer, length);
}
