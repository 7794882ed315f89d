/* Struct-padding information leak.
 *
 * A {1-byte direction; 4-byte distance} record occupies 8 bytes because the
 * int member needs 4-byte alignment; the 3 padding bytes between the members
 * are never written.  Serializing the record by copying sizeof(struct) raw
 * bytes (a common "send the struct over the wire" shortcut) therefore ships
 * whatever the allocator left in the padding: the secret-seeded fill
 * pattern, or zeros when poisoning is disabled.
 *
 * Output layout: [direction][3 padding bytes][distance bytes 0..3], where
 * direction = public[0] and distance = public[1..4], both zero-padded when
 * the public part is short.
 */

#include <string.h>

#include "harness.h"

struct wire_record {
    char direction;
    int distance;
};

_Static_assert(sizeof(struct wire_record) == 8,
               "expected 3 padding bytes between the members");

void hf_target_run(const uint8_t *pub, size_t pub_len,
                   const uint8_t *sec, size_t sec_len)
{
    (void)sec;
    (void)sec_len;
    hf_edge(1);

    struct wire_record *rec = hf_malloc(sizeof *rec);
    if (rec == NULL)
        return;

    rec->direction = (char)(pub_len > 0 ? pub[0] : 0);
    uint8_t distance_bytes[4] = {0};
    for (size_t i = 0; i < 4 && i + 1 < pub_len; i++)
        distance_bytes[i] = pub[i + 1];
    memcpy(&rec->distance, distance_bytes, sizeof distance_bytes);

    if (pub_len >= 5)
        hf_edge(2);
    else
        hf_edge(3);

    /* The leak: raw-copy the whole record, padding included. */
    hf_write_output(rec, sizeof *rec);
}
