/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define NAME_MAX_LEN 48

struct sdp_session {
    uint32_t id;
    char name[NAME_MAX_LEN];
};

static struct sdp_session g_sess;

static TEE_Result sdp_set_session_name(TEE_Param params[4])
{
    char name[NAME_MAX_LEN];
    uint32_t name_len = params[3].memref.size;

    if (name_len == 0) {
        return TEE_ERROR_BAD_PARAMETERS;
    }
    TEE_MemMove(name, params[3].memref.buffer, name_len);
    return TEE_SUCCESS;
}

static TEE_Result sdp_open_session(TEE_Param params[4])
{
    if (params[0].memref.size > sizeof(g_sess.name))
        return TEE_ERROR_BAD_PARAMETERS;
    TEE_MemMove(g_sess.name, params[0].memref.buffer, params[0].memref.size);
    return TEE_SUCCESS;
}
