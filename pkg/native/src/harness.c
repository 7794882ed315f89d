/* Harness shim: wire-format decoding, memory poisoning, coverage reporting.
 *
 * Protocol (one execution per process):
 *   stdin   [publicLen u32 LE][secretLen u32 LE][public bytes][secret bytes]
 *   stdout  the target's public output
 *   exit 0  always, for any input (decoding is total: a short header reads
 *           as zero-padded, oversized lengths clamp public-first, surplus
 *           body bytes are ignored)
 *
 * Environment:
 *   HYPERFUZZ_SHM_ID   name of a 65536-byte file under /dev/shm used as a
 *                      shared edge-counter map (optional)
 *   HYPERFUZZ_NO_FILL  "1" disables memory poisoning: allocations come from
 *                      freshly mapped zero pages and the stack fill is skipped
 *
 * Poisoning: before the target runs, a >= 64 KiB stack region below the
 * current frame is filled (best effort, 16 x 4 KiB frames) with an 8-byte
 * pattern derived from the secret part, and every hf_malloc() result is
 * filled with the same pattern.  Reads of "uninitialized" memory therefore
 * observe a deterministic, secret-dependent value.
 */

#define _DEFAULT_SOURCE

#include "harness.h"

#include <errno.h>
#include <fcntl.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/mman.h>
#include <unistd.h>

#define HF_MAP_SIZE 65536u
#define HF_REDZONE 64u
#define HF_STACK_FRAME 4096u
#define HF_STACK_DEPTH 16u

uint8_t hf_fill_pattern[8];
int hf_fill_enabled = 1;

static uint8_t *hf_shm_map = NULL;

void hf_edge(uint16_t id)
{
    if (hf_shm_map != NULL && hf_shm_map[id] != 0xFF)
        hf_shm_map[id]++;
}

void *hf_malloc(size_t size)
{
    size_t total = size + HF_REDZONE;
    void *mem = mmap(NULL, total, PROT_READ | PROT_WRITE,
                     MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
    if (mem == MAP_FAILED)
        return NULL;
    if (hf_fill_enabled) {
        uint8_t *bytes = mem;
        for (size_t i = 0; i < total; i++)
            bytes[i] = hf_fill_pattern[i & 7];
    }
    return mem;
}

void hf_write_output(const void *data, size_t len)
{
    const uint8_t *p = data;
    while (len > 0) {
        ssize_t n = write(STDOUT_FILENO, p, len);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return;
        }
        if (n == 0)
            return;
        p += (size_t)n;
        len -= (size_t)n;
    }
}

static uint64_t splitmix64_next(uint64_t *state)
{
    *state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = *state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/* Seed = little-endian value of the first 8 secret bytes (zero-padded),
 * advanced one SplitMix64 step; an all-zero result falls back to 0xA5s so
 * poison never degenerates to zeros. */
static void derive_fill_pattern(const uint8_t *secret, size_t len)
{
    uint64_t seed = 0;
    size_t take = len < 8 ? len : 8;
    for (size_t i = 0; i < take; i++)
        seed |= (uint64_t)secret[i] << (8 * i);
    uint64_t value = splitmix64_next(&seed);
    if (value == 0) {
        memset(hf_fill_pattern, 0xA5, sizeof hf_fill_pattern);
        return;
    }
    for (size_t i = 0; i < 8; i++)
        hf_fill_pattern[i] = (uint8_t)(value >> (8 * i));
}

__attribute__((noinline))
static void stack_fill_frame(unsigned depth)
{
    volatile uint8_t frame[HF_STACK_FRAME];
    for (size_t i = 0; i < sizeof frame; i++)
        frame[i] = hf_fill_pattern[i & 7];
    if (depth > 0)
        stack_fill_frame(depth - 1);
}

static void map_coverage(void)
{
    const char *name = getenv("HYPERFUZZ_SHM_ID");
    char path[512];
    if (name == NULL || name[0] == '\0')
        return;
    if (snprintf(path, sizeof path, "/dev/shm/%s", name) >= (int)sizeof path)
        return;
    int fd = open(path, O_RDWR);
    if (fd < 0)
        return;
    void *map = mmap(NULL, HF_MAP_SIZE, PROT_READ | PROT_WRITE,
                     MAP_SHARED, fd, 0);
    close(fd);
    if (map != MAP_FAILED)
        hf_shm_map = map;
}

static uint8_t *read_all_stdin(size_t *out_len)
{
    size_t cap = 65536, len = 0;
    uint8_t *buf = malloc(cap);
    *out_len = 0;
    if (buf == NULL)
        return NULL;
    for (;;) {
        if (len == cap) {
            uint8_t *grown;
            cap *= 2;
            grown = realloc(buf, cap);
            if (grown == NULL) {
                free(buf);
                return NULL;
            }
            buf = grown;
        }
        ssize_t n = read(STDIN_FILENO, buf + len, cap - len);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            free(buf);
            return NULL;
        }
        if (n == 0)
            break;
        len += (size_t)n;
    }
    *out_len = len;
    return buf;
}

static uint32_t le32(const uint8_t *p)
{
    return (uint32_t)p[0] | ((uint32_t)p[1] << 8) |
           ((uint32_t)p[2] << 16) | ((uint32_t)p[3] << 24);
}

int main(void)
{
    const char *no_fill = getenv("HYPERFUZZ_NO_FILL");
    if (no_fill != NULL && strcmp(no_fill, "1") == 0)
        hf_fill_enabled = 0;
    map_coverage();

    size_t raw_len;
    uint8_t *raw = read_all_stdin(&raw_len);
    if (raw == NULL)
        return 0; /* read failure: empty output, still a clean exit */

    uint8_t header[8] = {0};
    memcpy(header, raw, raw_len < 8 ? raw_len : 8);
    size_t body_len = raw_len > 8 ? raw_len - 8 : 0;
    const uint8_t *body = raw + (raw_len - body_len);

    size_t pub_len = le32(header);
    if (pub_len > body_len)
        pub_len = body_len; /* clamp public first */
    size_t sec_len = le32(header + 4);
    if (sec_len > body_len - pub_len)
        sec_len = body_len - pub_len; /* surplus body bytes are ignored */

    if (hf_fill_enabled) {
        derive_fill_pattern(body + pub_len, sec_len);
        stack_fill_frame(HF_STACK_DEPTH - 1);
    }

    hf_target_run(body, pub_len, body + pub_len, sec_len);
    free(raw);
    return 0;
}
