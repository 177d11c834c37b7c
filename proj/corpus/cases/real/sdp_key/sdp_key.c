/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define SDP_KEY_MAX 32

struct sdp_key_slot {
    uint32_t key_len;
    uint8_t key[SDP_KEY_MAX];
};

static struct sdp_key_slot g_slot;

TEE_Result sdp_set_key(TEE_Param params[4])
{
    uint8_t key[SDP_KEY_MAX];
    uint32_t key_len = params[0].memref.size;

    if (params[0].memref.buffer == NULL || key_len == 0)
        return TEE_ERROR_BAD_PARAMETERS;

    TEE_MemMove(key, params[0].memref.buffer, key_len);
    g_slot.key_len = key_len;
    return TEE_SUCCESS;
}
