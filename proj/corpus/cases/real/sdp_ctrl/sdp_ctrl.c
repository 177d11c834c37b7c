/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

struct sdp_ctrl {
    uint32_t op;
    uint32_t arg;
};

TEE_Result sdp_read_ctrl(TEE_Param params[4])
{
    uint8_t raw[8];
    unsigned long n = (unsigned long)params[0].memref.size;

    TEE_MemMove(raw, params[0].memref.buffer, n);
    return TEE_SUCCESS;
}
