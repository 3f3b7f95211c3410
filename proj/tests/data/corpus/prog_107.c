#include <stdio.h>
int helper(int count, int mid)
{
    int k = 0;
    int n = 1;
    while (n <= count) {
        if (n % mid == 0)
            k++;
        n++;
    }
    return k;
}
int main(void)
{
    int count = 126;
    int mid = 2;
    int k = helper(count, mid);
    printf("%d\n", k);
    return 0;
}
