package com.acme.dispatch;

/** Exponential backoff between attempts. */
public class RetryPolicy {
    public long nextDelay(int attempt) {
        return 100L << attempt;
    }
}
