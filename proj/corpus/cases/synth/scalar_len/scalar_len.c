/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <string.h>
#include <tee_internal_api.h>

static void pad_block(uint8_t *out, const uint8_t *in, uint32_t in_len)
{
    uint8_t block[32];

    memset(block, 0, sizeof(block));
    memcpy(block, in, in_len);
    memcpy(out, block, sizeof(block));
}
