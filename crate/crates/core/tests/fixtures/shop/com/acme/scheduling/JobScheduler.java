package com.acme.scheduling;

import com.acme.billing.InvoiceService;
import com.acme.util.Clock;

/** Schedules processes on worker threads. */
public class JobScheduler {
    private JobQueue queue = new JobQueue();
    private ProcessRunner runner = new ProcessRunner();
    private InvoiceService invoices;

    public void scheduleJob(String job) {
        queue.pushJob(job);
        long started = Clock.now();
        String next = queue.popJob();
        if (runner.startJob(next) != 0) {
            runner.stopJob(next);
        }
        invoices.billJob(job, 1.0);
    }
}
