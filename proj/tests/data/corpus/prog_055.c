#include <stdio.h>
int helper(int cur, int mid)
{
    while (mid != 0) {
        int step = mid;
        mid = cur % mid;
        cur = step;
    }
    return cur;
}
int process(int cur, int mid)
{
    int total = helper(cur, mid);
    return cur / total * mid;
}
int main(void)
{
    int cur = 45;
    int mid = 129;
    printf("%d %d\n", helper(cur, mid), process(cur, mid));
    return 0;
}
